use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::format_snr;
use super::system::{FrameOutcome, SystemConfig};
use crate::bmc::ChannelModel;
use crate::{Error, Result};

pub const CSV_HEADER: &str =
    "snr_db,frames,errors,fer,fer_ci95,exhausted,visits_mean,visits_p50,visits_p99,visits_max,seconds,seed";

const Z_95: f64 = 1.959_963_984_540_054;
const FIRST_CHUNK: u64 = 64;
const MAX_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub points: Vec<ChannelModel>,
    pub system: SystemConfig,
    /// Stop a point once this many frame errors are seen.
    pub min_errors: u64,
    /// Stop a point after this many frames regardless.
    pub max_frames: u64,
    pub seed: u64,
    /// Worker threads; `None` uses one per core.
    pub workers: Option<usize>,
}

/// Forward-move statistics of a sequential decoder over all frames of a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VisitStats {
    pub mean: f64,
    pub p50: u64,
    pub p99: u64,
    pub max: u64,
}

impl VisitStats {
    fn from_samples(mut v: Vec<u64>) -> Option<Self> {
        if v.is_empty() {
            return None;
        }
        v.sort_unstable();
        let rank = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(Self {
            mean: v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64,
            p50: rank(0.5),
            p99: rank(0.99),
            max: *v.last().unwrap(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub channel: ChannelModel,
    pub frames: u64,
    pub errors: u64,
    pub fer: f64,
    pub fer_ci95: f64,
    /// Frames where the decoder ran out of budget (sequential decoding only).
    pub exhausted: Option<u64>,
    pub visits: Option<VisitStats>,
    pub seconds: f64,
    pub seed: u64,
}

/// Half-width of the 95% Wilson score interval for `errors` out of `frames`.
pub fn wilson_half_width(errors: u64, frames: u64) -> f64 {
    if frames == 0 {
        return f64::NAN;
    }
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    Z_95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Runs every point of the sweep.
///
/// Frames are simulated in parallel chunks and then scanned in frame order,
/// stopping at exactly the frame that reaches `min_errors` (or at
/// `max_frames`). The result depends only on the seed and the configuration,
/// never on the worker count.
pub fn run_fer(config: &SimConfig) -> Result<Vec<SimRecord>> {
    if config.max_frames == 0 {
        return Err(Error::InvalidArgument("max frames must be at least 1".into()));
    }
    if config.min_errors == 0 {
        return Err(Error::InvalidArgument("min errors must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    pool.install(|| {
        config
            .points
            .iter()
            .enumerate()
            .map(|(i, ch)| run_point(config, ch, i as u64))
            .collect()
    })
}

fn run_point(config: &SimConfig, channel: &ChannelModel, point: u64) -> Result<SimRecord> {
    let start = Instant::now();
    let system = config.system.build(channel, config.seed, point)?;
    let mut frames = 0u64;
    let mut errors = 0u64;
    let mut exhausted = 0u64;
    let mut visits = Vec::new();
    let mut chunk = FIRST_CHUNK;
    'outer: while frames < config.max_frames {
        let end = (frames + chunk).min(config.max_frames);
        let outcomes: Vec<FrameOutcome> = (frames..end)
            .into_par_iter()
            .map_init(
                || system.decoder(),
                |dec, f| match dec {
                    Ok(dec) => system.run_frame(dec, channel, config.seed, point, f),
                    Err(e) => Err(e.clone()),
                },
            )
            .collect::<Result<_>>()?;
        for out in outcomes {
            frames += 1;
            errors += out.error as u64;
            exhausted += out.exhausted as u64;
            if let Some(v) = out.visits {
                visits.push(v);
            }
            if errors >= config.min_errors {
                break 'outer;
            }
        }
        chunk = (chunk * 2).min(MAX_CHUNK);
    }
    let sequential = system.pac().is_some();
    Ok(SimRecord {
        channel: *channel,
        frames,
        errors,
        fer: errors as f64 / frames as f64,
        fer_ci95: wilson_half_width(errors, frames),
        exhausted: sequential.then_some(exhausted),
        visits: VisitStats::from_samples(visits),
        seconds: start.elapsed().as_secs_f64(),
        seed: config.seed,
    })
}

#[derive(Serialize)]
#[serde(untagged)]
enum PointLabel {
    Snr(f64),
    Channel(String),
}

#[derive(Serialize)]
struct Row {
    snr_db: PointLabel,
    frames: u64,
    errors: u64,
    fer: f64,
    fer_ci95: f64,
    exhausted: Option<u64>,
    visits_mean: Option<f64>,
    visits_p50: Option<u64>,
    visits_p99: Option<u64>,
    visits_max: Option<u64>,
    seconds: Option<f64>,
    seed: u64,
}

impl Row {
    fn new(r: &SimRecord, timing: bool) -> Self {
        Self {
            snr_db: match r.channel.snr_db() {
                Some(s) => PointLabel::Snr(format_snr(s).parse().unwrap_or(s)),
                None => PointLabel::Channel(r.channel.to_string()),
            },
            frames: r.frames,
            errors: r.errors,
            fer: r.fer,
            fer_ci95: r.fer_ci95,
            exhausted: r.exhausted,
            visits_mean: r.visits.map(|v| v.mean),
            visits_p50: r.visits.map(|v| v.p50),
            visits_p99: r.visits.map(|v| v.p99),
            visits_max: r.visits.map(|v| v.max),
            seconds: timing.then_some(r.seconds),
            seed: r.seed,
        }
    }

    fn csv_line(&self) -> String {
        fn opt<T: ToString>(v: Option<T>) -> String {
            v.map(|x| x.to_string()).unwrap_or_default()
        }
        let label = match &self.snr_db {
            PointLabel::Snr(s) => s.to_string(),
            PointLabel::Channel(c) => c.clone(),
        };
        [
            label,
            self.frames.to_string(),
            self.errors.to_string(),
            self.fer.to_string(),
            self.fer_ci95.to_string(),
            opt(self.exhausted),
            opt(self.visits_mean),
            opt(self.visits_p50),
            opt(self.visits_p99),
            opt(self.visits_max),
            opt(self.seconds),
            self.seed.to_string(),
        ]
        .join(",")
    }
}

/// CSV table, one row per point. Wall-clock seconds are written only when
/// `timing` is set, so that untimed runs are byte-for-byte reproducible.
pub fn records_to_csv(records: &[SimRecord], timing: bool) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&Row::new(r, timing).csv_line());
        out.push('\n');
    }
    out
}

/// JSON array mirroring the CSV columns; blank cells become `null`.
pub fn records_to_json(records: &[SimRecord], timing: bool) -> String {
    let rows: Vec<Row> = records.iter().map(|r| Row::new(r, timing)).collect();
    serde_json::to_string_pretty(&rows).expect("rows serialize")
}
