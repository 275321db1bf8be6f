//! Monte-Carlo frame-error-rate estimation and the dispersion reference.

mod dispersion;
mod run;
mod streams;
mod system;

pub use dispersion::{channel_dispersion, dispersion_fer, q_function, reference_csv, DispersionStats};
pub use run::{records_to_csv, records_to_json, run_fer, wilson_half_width, SimConfig, SimRecord, VisitStats, CSV_HEADER};
pub use streams::{derive_seed, frame_stream, Stream};
pub use system::{CodeKind, FrameDecoder, FrameOutcome, System, SystemConfig};

use crate::{Error, Result};

/// Parses `start:step:stop` (inclusive) or a single value into SNR points.
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::parse(t, "not a number"))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 {
                return Err(Error::parse(s, "step must be positive"));
            }
            if stop < start {
                return Err(Error::parse(s, "stop is below start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| round_snr(start + i as f64 * step)).collect())
        }
        _ => Err(Error::parse(s, "expected start:step:stop")),
    }
}

fn round_snr(x: f64) -> f64 {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// SNR value as printed in tables (rounded to 1e-9 dB).
pub fn format_snr(snr_db: f64) -> String {
    format!("{}", round_snr(snr_db))
}
