//! Simulation settings: flat key-value config files, flag overrides and the
//! run manifest written next to every output.

use std::path::Path;

use anyhow::{bail, Context, Result};
use polarforge::pac::{BiasRule, ConvSpec, FanoParams, RuleKind};
use polarforge::polar::CrcSpec;
use polarforge::sc::CheckNode;
use polarforge::simkit::{parse_snr_grid, CodeKind, SimConfig, SystemConfig};
use polarforge::bmc::ChannelModel;
use serde::{Deserialize, Serialize};

use crate::args::SimulateArgs;

pub const SEED_ENV: &str = "POLARFORGE_SEED";
const DEFAULT_SEED: u64 = 1;

/// Keys accepted in a config file. A manifest is itself a valid config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(rename = "version")]
    _version: Option<String>,
    pub channels: Option<Vec<String>>,
    pub snr: Option<String>,
    pub code: Option<String>,
    #[serde(alias = "N")]
    pub n: Option<usize>,
    #[serde(alias = "K")]
    pub k: Option<usize>,
    pub rule: Option<String>,
    pub conv: Option<String>,
    pub bias: Option<String>,
    pub delta: Option<f64>,
    pub max_visits: Option<u64>,
    pub list: Option<usize>,
    pub crc: Option<u32>,
    pub min_errors: Option<u64>,
    pub max_frames: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub samples: Option<u64>,
    pub design: Option<String>,
    pub min_sum: Option<bool>,
    pub timing: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), one_line(&e.to_string())))
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Fully resolved simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub version: String,
    pub channels: Vec<String>,
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub rule: String,
    pub conv: String,
    pub bias: String,
    pub delta: f64,
    pub max_visits: u64,
    pub list: usize,
    pub crc: u32,
    pub min_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub design: Option<String>,
    pub min_sum: bool,
    pub timing: bool,
}

pub fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{SEED_ENV}=`{s}` is not an unsigned integer")),
        Err(_) => Ok(None),
    }
}

fn expand_channels(tokens: &[String], snr: Option<&str>) -> Result<Vec<String>> {
    if tokens.is_empty() {
        bail!("no channel given (e.g. `biawgn --snr 0:0.5:3` or `bec:0.3`)");
    }
    let grid = snr.map(parse_snr_grid).transpose()?;
    let mut out = Vec::new();
    let mut used_grid = false;
    for token in tokens {
        let t = token.trim();
        if t == "biawgn" || t == "awgn" {
            let Some(grid) = &grid else {
                bail!("channel `{t}` needs an SNR grid (--snr start:step:stop)");
            };
            used_grid = true;
            for &s in grid {
                out.push(ChannelModel::biawgn_snr_db(s)?.to_string());
            }
        } else {
            let ch: ChannelModel = t.parse()?;
            out.push(ch.to_string());
        }
    }
    if grid.is_some() && !used_grid {
        bail!("--snr given but no bare `biawgn` channel to apply it to");
    }
    Ok(out)
}

impl Manifest {
    /// Merges flags over file values over defaults.
    pub fn resolve(args: &SimulateArgs, file: FileConfig) -> Result<Self> {
        let channels = if !args.channels.is_empty() {
            expand_channels(&args.channels, args.snr.as_deref().or(file.snr.as_deref()))?
        } else {
            expand_channels(
                file.channels.as_deref().unwrap_or_default(),
                args.snr.as_deref().or(file.snr.as_deref()),
            )?
        };
        let code: CodeKind = args
            .code
            .as_deref()
            .or(file.code.as_deref())
            .context("no code given (--code polar-sc|polar-cascl|pac-fano)")?
            .parse()?;
        let n = args.n.or(file.n).context("no block length given (-N)")?;
        let k = args.k.or(file.k).context("no dimension given (-K)")?;
        let rule: RuleKind = match args.rule.as_deref().or(file.rule.as_deref()) {
            Some(r) => r.parse()?,
            None => SystemConfig::new(code, n, k).rule,
        };
        let conv: ConvSpec = match args.conv.as_deref().or(file.conv.as_deref()) {
            Some(c) => c.parse()?,
            None => ConvSpec::default(),
        };
        let bias: BiasRule = match args.bias.as_deref().or(file.bias.as_deref()) {
            Some(b) => b.parse()?,
            None => BiasRule::default(),
        };
        let defaults = FanoParams::default();
        let design = match args.design.as_deref().or(file.design.as_deref()) {
            Some(d) => Some(d.parse::<ChannelModel>()?.to_string()),
            None => None,
        };
        let seed = match args.seed.or(file.seed) {
            Some(s) => s,
            None => env_seed()?.unwrap_or(DEFAULT_SEED),
        };
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            channels,
            code: code.to_string(),
            n,
            k,
            rule: rule.to_string(),
            conv: conv.to_string(),
            bias: bias.to_string(),
            delta: args.delta.or(file.delta).unwrap_or(defaults.delta),
            max_visits: args.max_visits.or(file.max_visits).unwrap_or(defaults.max_visits),
            list: args.list.or(file.list).unwrap_or(32),
            crc: args.crc.or(file.crc).unwrap_or(8),
            min_errors: args.min_errors.or(file.min_errors).unwrap_or(100),
            max_frames: args.max_frames.or(file.max_frames).unwrap_or(10_000_000),
            seed,
            workers: args.workers.or(file.workers),
            samples: args.samples.or(file.samples).unwrap_or(100_000),
            design,
            min_sum: args.min_sum || file.min_sum.unwrap_or(false),
            timing: args.timing || file.timing.unwrap_or(false),
        })
    }

    pub fn sim_config(&self) -> Result<SimConfig> {
        let kind: CodeKind = self.code.parse()?;
        let mut system = SystemConfig::new(kind, self.n, self.k);
        system.rule = self.rule.parse()?;
        system.conv = self.conv.parse()?;
        system.fano = FanoParams {
            delta: self.delta,
            max_visits: self.max_visits,
            ..FanoParams::default()
        };
        system.bias = self.bias.parse()?;
        system.list_size = self.list;
        system.crc = match (kind, self.crc) {
            (CodeKind::PolarCaScl, w) if w > 0 => Some(CrcSpec::with_width(w)?),
            _ => None,
        };
        system.check = if self.min_sum { CheckNode::MinSum } else { CheckNode::Exact };
        system.design = self.design.as_deref().map(str::parse).transpose()?;
        system.construction_samples = self.samples;
        if self.workers == Some(0) {
            bail!("--workers must be at least 1");
        }
        Ok(SimConfig {
            points: self
                .channels
                .iter()
                .map(|c| c.parse())
                .collect::<polarforge::Result<_>>()?,
            system,
            min_errors: self.min_errors,
            max_frames: self.max_frames,
            seed: self.seed,
            workers: self.workers,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}
