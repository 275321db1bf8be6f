use serde::Serialize;

use crate::bmc::{softplus, ChannelModel, GaussHermite};

/// Mean and variance of the information density `i(X;Y)` under uniform inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionStats {
    /// Bits per channel use.
    pub capacity: f64,
    /// Bits² per channel use.
    pub dispersion: f64,
}

pub fn channel_dispersion(channel: &ChannelModel) -> DispersionStats {
    match *channel {
        ChannelModel::Bec { erasure } => DispersionStats {
            capacity: 1.0 - erasure,
            dispersion: erasure * (1.0 - erasure),
        },
        ChannelModel::Bsc { crossover: p } => {
            let dispersion = if p <= 0.0 || p >= 1.0 {
                0.0
            } else {
                p * (1.0 - p) * ((1.0 - p) / p).log2().powi(2)
            };
            DispersionStats { capacity: channel.capacity(), dispersion }
        }
        ChannelModel::Biawgn { sigma2 } => {
            let rule = GaussHermite::default_rule();
            let sigma = sigma2.sqrt();
            let density = |z: f64| {
                let llr = 2.0 * (1.0 + sigma * z) / sigma2;
                1.0 - softplus(-llr) / std::f64::consts::LN_2
            };
            let mean = rule.expect_std_normal(density);
            let second = rule.expect_std_normal(|z| density(z).powi(2));
            DispersionStats {
                capacity: mean,
                dispersion: (second - mean * mean).max(0.0),
            }
        }
    }
}

/// Standard normal upper tail `Q(x) = ½·erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Normal-approximation frame error rate of a length-`n`, dimension-`k`
/// code: `Q((n·C − k + ½·log2 n) / √(n·V))`, the `½·log2 n` term only when
/// `log_correction` is set. With zero dispersion the result is 0 or 1 by
/// the sign of the numerator.
pub fn dispersion_fer(n: usize, k: usize, channel: &ChannelModel, log_correction: bool) -> f64 {
    let DispersionStats { capacity, dispersion } = channel_dispersion(channel);
    let nf = n as f64;
    let mut margin = nf * capacity - k as f64;
    if log_correction {
        margin += 0.5 * nf.log2();
    }
    if dispersion <= 0.0 {
        return if margin > 0.0 { 0.0 } else { 1.0 };
    }
    q_function(margin / (nf * dispersion).sqrt())
}

/// `snr_db,fer_approx` table for a BIAWGN SNR grid.
pub fn reference_csv(n: usize, k: usize, snrs_db: &[f64], log_correction: bool) -> crate::Result<String> {
    let mut out = String::from("snr_db,fer_approx\n");
    for &snr in snrs_db {
        let ch = ChannelModel::biawgn_snr_db(snr)?;
        out.push_str(&format!(
            "{},{}\n",
            super::format_snr(snr),
            dispersion_fer(n, k, &ch, log_correction)
        ));
    }
    Ok(out)
}
