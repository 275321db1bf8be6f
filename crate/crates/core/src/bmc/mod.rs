//! Binary-input memoryless channels and their information measures.
//!
//! All measures are in bits. LLRs are natural-log `ln(W(y|0) / W(y|1))`
//! and are clipped to `±LLR_MAX` so decoder recursions stay finite.
//! The BIAWGN channel maps bit 0 to +1 and bit 1 to −1.

mod quadrature;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};
pub use quadrature::{GaussHermite, DEFAULT_NODES};

/// Magnitude cap applied to every channel LLR.
pub const LLR_MAX: f64 = 40.0;

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub(crate) fn clip_llr(llr: f64) -> f64 {
    llr.clamp(-LLR_MAX, LLR_MAX)
}

fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// A binary-input memoryless channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Binary erasure channel with erasure probability ε.
    Bec { erasure: f64 },
    /// Binary symmetric channel with crossover probability p.
    Bsc { crossover: f64 },
    /// Binary-input AWGN channel with noise variance σ² (SNR = 1/σ²).
    Biawgn { sigma2: f64 },
}

/// One channel output symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    Bit(u8),
    Erasure,
    Real(f64),
}

/// Capacity, cutoff rate and Bhattacharyya parameter of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoTriple {
    pub capacity_bits: f64,
    pub cutoff_rate_bits: f64,
    pub bhattacharyya: f64,
}

impl ChannelModel {
    pub fn bec(erasure: f64) -> Result<Self> {
        Self::Bec { erasure }.validated()
    }

    pub fn bsc(crossover: f64) -> Result<Self> {
        Self::Bsc { crossover }.validated()
    }

    pub fn biawgn_sigma2(sigma2: f64) -> Result<Self> {
        Self::Biawgn { sigma2 }.validated()
    }

    /// BIAWGN channel with `σ² = 10^(−snr_db/10)`.
    pub fn biawgn_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidChannel(format!("SNR {snr_db} dB is not finite")));
        }
        Self::biawgn_sigma2(10f64.powf(-snr_db / 10.0))
    }

    fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Bec { erasure: p } | Self::Bsc { crossover: p } => (0.0..=1.0).contains(&p),
            Self::Biawgn { sigma2 } => sigma2.is_finite() && sigma2 > 0.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidChannel(format!("parameter out of range in {self}")))
        }
    }

    /// SNR in dB for the BIAWGN channel.
    pub fn snr_db(&self) -> Option<f64> {
        match *self {
            Self::Biawgn { sigma2 } => Some(-10.0 * sigma2.log10()),
            _ => None,
        }
    }

    /// Symmetric capacity in bits per use.
    pub fn capacity(&self) -> f64 {
        self.capacity_with(GaussHermite::default_rule())
    }

    pub fn capacity_with(&self, rule: &GaussHermite) -> f64 {
        match *self {
            Self::Bec { erasure } => 1.0 - erasure,
            Self::Bsc { crossover } => 1.0 - binary_entropy(crossover),
            Self::Biawgn { sigma2 } => {
                let sigma = sigma2.sqrt();
                let c = rule.expect_std_normal(|z| {
                    let llr = 2.0 * (1.0 + sigma * z) / sigma2;
                    1.0 - softplus(-llr) / std::f64::consts::LN_2
                });
                c.clamp(0.0, 1.0)
            }
        }
    }

    /// Symmetric cutoff rate `1 − log2(1 + Z)` in bits per use.
    pub fn cutoff_rate(&self) -> f64 {
        self.cutoff_rate_with(GaussHermite::default_rule())
    }

    pub fn cutoff_rate_with(&self, rule: &GaussHermite) -> f64 {
        cutoff_from_bhattacharyya(self.bhattacharyya_with(rule))
    }

    /// Bhattacharyya parameter `Σ_y √(W(y|0) W(y|1))`.
    pub fn bhattacharyya(&self) -> f64 {
        self.bhattacharyya_with(GaussHermite::default_rule())
    }

    pub fn bhattacharyya_with(&self, rule: &GaussHermite) -> f64 {
        match *self {
            Self::Bec { erasure } => erasure,
            Self::Bsc { crossover: p } => 2.0 * (p * (1.0 - p)).sqrt(),
            Self::Biawgn { sigma2 } => {
                // Z = E[ sqrt(W(y|1)/W(y|0)) | x = 0 ] = E[e^{-L/2}]
                let sigma = sigma2.sqrt();
                let z = rule.expect_std_normal(|t| (-(1.0 + sigma * t) / sigma2).exp());
                z.clamp(0.0, 1.0)
            }
        }
    }

    pub fn info(&self) -> InfoTriple {
        let bhattacharyya = self.bhattacharyya();
        InfoTriple {
            capacity_bits: self.capacity(),
            cutoff_rate_bits: cutoff_from_bhattacharyya(bhattacharyya),
            bhattacharyya,
        }
    }

    /// Natural-log LLR of one output symbol, clipped to `±LLR_MAX`.
    pub fn llr(&self, y: Symbol) -> Result<f64> {
        let llr = match (*self, y) {
            (Self::Bec { .. }, Symbol::Erasure) => 0.0,
            (Self::Bec { .. }, Symbol::Bit(0)) => LLR_MAX,
            (Self::Bec { .. }, Symbol::Bit(1)) => -LLR_MAX,
            (Self::Bsc { crossover: p }, Symbol::Bit(b @ (0 | 1))) => {
                let magnitude = ((1.0 - p) / p).ln();
                if b == 0 {
                    magnitude
                } else {
                    -magnitude
                }
            }
            (Self::Biawgn { sigma2 }, Symbol::Real(y)) if y.is_finite() => 2.0 * y / sigma2,
            (_, y) => return Err(Error::InvalidSymbol(format!("{y:?} for {self}"))),
        };
        // p = 0 gives ±inf and p = 0.5 gives 0; NaN cannot arise.
        Ok(clip_llr(llr))
    }

    /// Draws one output for input bit `x`. Each call consumes exactly one
    /// variate from `rng` regardless of `x`, so paired runs see the same
    /// noise.
    pub fn sample<R: Rng + ?Sized>(&self, x: u8, rng: &mut R) -> Symbol {
        debug_assert!(x <= 1);
        match *self {
            Self::Bec { erasure } => {
                if rng.random::<f64>() < erasure {
                    Symbol::Erasure
                } else {
                    Symbol::Bit(x)
                }
            }
            Self::Bsc { crossover } => {
                let flip = (rng.random::<f64>() < crossover) as u8;
                Symbol::Bit(x ^ flip)
            }
            Self::Biawgn { sigma2 } => {
                let s = if x == 0 { 1.0 } else { -1.0 };
                let z: f64 = rng.sample(StandardNormal);
                Symbol::Real(s + sigma2.sqrt() * z)
            }
        }
    }

    /// `llr(sample(x))` without the intermediate symbol.
    pub fn transmit_llr<R: Rng + ?Sized>(&self, x: u8, rng: &mut R) -> f64 {
        self.llr(self.sample(x, rng))
            .expect("sampled symbols are always in the output alphabet")
    }
}

/// `R₀ = 1 − log2(1 + Z)`.
pub fn cutoff_from_bhattacharyya(z: f64) -> f64 {
    1.0 - (1.0 + z).log2()
}

/// Inverse of [`cutoff_from_bhattacharyya`]: `Z = 2^(1 − R₀) − 1`.
pub fn bhattacharyya_from_cutoff(r0: f64) -> f64 {
    (1.0 - r0).exp2() - 1.0
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bec { erasure } => write!(f, "bec:{erasure}"),
            Self::Bsc { crossover } => write!(f, "bsc:{crossover}"),
            Self::Biawgn { sigma2 } => write!(f, "biawgn:sigma2={sigma2}"),
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    /// Accepts `bec:0.5`, `bsc:0.1`, `biawgn:snr_db=3.0` and
    /// `biawgn:sigma2=0.501187`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(s, "expected <kind>:<parameter>"))?;
        let number = |tok: &str| -> Result<f64> {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(tok, "not a number"))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "bec" => Self::bec(number(arg)?),
            "bsc" => Self::bsc(number(arg)?),
            "biawgn" | "awgn" => match arg.split_once('=') {
                Some((key, value)) => match key.trim() {
                    "snr_db" | "snr" => Self::biawgn_snr_db(number(value)?),
                    "sigma2" => Self::biawgn_sigma2(number(value)?),
                    other => Err(Error::parse(other, "expected snr_db or sigma2")),
                },
                None => Self::biawgn_snr_db(number(arg)?),
            },
            other => Err(Error::parse(other, "unknown channel kind (bec, bsc, biawgn)")),
        }
    }
}

impl Serialize for ChannelModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChannelModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// M-ary erasure channel with `M = 2^m` inputs. Used only for the
/// closed-form cutoff-rate splitting identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MecParams {
    m: u32,
    erasure: f64,
}

/// Capacity and cutoff rate of the MEC and of one of its coordinate BECs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MecSplit {
    pub c_m: f64,
    pub r0_m: f64,
    pub c_1: f64,
    pub r0_1: f64,
}

impl MecParams {
    pub fn new(m: u32, erasure: f64) -> Result<Self> {
        if !(2..=62).contains(&m) {
            return Err(Error::InvalidArgument(format!("MEC needs 2 <= m <= 62, got {m}")));
        }
        if !(0.0..=1.0).contains(&erasure) {
            return Err(Error::InvalidArgument(format!("erasure probability {erasure} outside [0, 1]")));
        }
        Ok(Self { m, erasure })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn erasure(&self) -> f64 {
        self.erasure
    }

    pub fn split(&self) -> MecSplit {
        let m = self.m as f64;
        let e = self.erasure;
        let symbols = (1u64 << self.m) as f64;
        MecSplit {
            c_m: m * (1.0 - e),
            r0_m: m - (1.0 + (symbols - 1.0) * e).log2(),
            c_1: 1.0 - e,
            r0_1: 1.0 - (1.0 + e).log2(),
        }
    }
}

impl MecSplit {
    /// Cutoff-rate gain from splitting: `m·R0(1) − R0(m)`.
    pub fn boost_margin(&self, m: u32) -> f64 {
        m as f64 * self.r0_1 - self.r0_m
    }
}
