//! Polarization-adjusted convolutional (PAC) codes.
//!
//! A source word is placed on the data positions of a carrier `v`, passed
//! through a rate-1 convolution `u = v·T` (upper-triangular Toeplitz `T`
//! with unit diagonal), and then through the polar transform. Decoding
//! searches the resulting irregular tree with the Fano algorithm.

mod fano;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::polar::CodeSpec;
use crate::polarize::{polar_transform_in_place, BitChannelStats};
use crate::{Error, Result};

pub use fano::{branch_metric, fano_decode, FanoDecoder, FanoOutcome, MetricCalculator};

/// Impulse response `c = (c_0, …, c_m)` of the precoding convolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvSpec {
    taps: Vec<u8>,
}

impl ConvSpec {
    pub fn new(taps: Vec<u8>) -> Result<Self> {
        if taps.is_empty() || taps.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!("impulse response {taps:?} must be non-empty bits")));
        }
        if taps[0] != 1 || taps[taps.len() - 1] != 1 {
            return Err(Error::InvalidArgument(format!(
                "impulse response {taps:?} must start and end with 1"
            )));
        }
        Ok(Self { taps })
    }

    /// `c = (1)`, i.e. `T = I`.
    pub fn identity() -> Self {
        Self { taps: vec![1] }
    }

    pub fn taps(&self) -> &[u8] {
        &self.taps
    }

    /// Memory `m` (constraint length minus one).
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    /// `Σ_{j≥1} c_j v_{i−j}`: the part of `u_i` fixed by earlier inputs.
    #[inline]
    pub(crate) fn feedback(&self, v: &[u8], i: usize) -> u8 {
        let mut acc = 0;
        for (j, &c) in self.taps.iter().enumerate().skip(1) {
            if j > i {
                break;
            }
            acc ^= c & v[i - j];
        }
        acc
    }
}

impl Default for ConvSpec {
    fn default() -> Self {
        Self { taps: vec![1, 0, 1, 1, 0, 1, 1] }
    }
}

impl fmt::Display for ConvSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.taps {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for ConvSpec {
    type Err = Error;

    /// A 0/1 string with `c_0` first, e.g. `1011011`.
    fn from_str(s: &str) -> Result<Self> {
        let taps = s
            .trim()
            .chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::parse(s, "impulse response must be a 0/1 string")),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(taps).map_err(|e| Error::parse(s, e.to_string()))
    }
}

/// `u_i = Σ_j c_j v_{i−j}` over GF(2), truncated to `v.len()`.
pub fn conv_encode(v: &[u8], conv: &ConvSpec) -> Vec<u8> {
    (0..v.len()).map(|i| v[i] ^ conv.feedback(v, i)).collect()
}

/// The unique `v` with `conv_encode(v) = u` (forward substitution).
pub fn conv_invert(u: &[u8], conv: &ConvSpec) -> Vec<u8> {
    let mut v = vec![0u8; u.len()];
    for i in 0..u.len() {
        v[i] = u[i] ^ conv.feedback(&v, i);
    }
    v
}

/// Score function used to pick the data positions.
#[derive(Debug, Clone, Copy)]
pub enum ScoreRule<'a> {
    /// `s(i) = w(i − 1)`, the Hamming weight of the 0-based index.
    ReedMuller,
    /// `s(i) = C(W_i)`.
    Capacity(&'a BitChannelStats),
    /// `s(i) = R₀(W_i)`.
    Cutoff(&'a BitChannelStats),
}

/// Named design rules as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RuleKind {
    #[serde(rename = "rm")]
    ReedMuller,
    /// Cutoff-rate score, equivalently smallest Bhattacharyya parameter.
    #[serde(rename = "polar-z")]
    PolarZ,
    #[serde(rename = "polar-c")]
    PolarC,
}

impl RuleKind {
    pub fn needs_stats(self) -> bool {
        self != RuleKind::ReedMuller
    }

    pub fn score_rule(self, stats: Option<&BitChannelStats>) -> Result<ScoreRule<'_>> {
        match (self, stats) {
            (RuleKind::ReedMuller, _) => Ok(ScoreRule::ReedMuller),
            (RuleKind::PolarZ, Some(s)) => Ok(ScoreRule::Cutoff(s)),
            (RuleKind::PolarC, Some(s)) => Ok(ScoreRule::Capacity(s)),
            (kind, None) => Err(Error::InvalidArgument(format!("rule {kind} needs bit-channel statistics"))),
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::ReedMuller => "rm",
            RuleKind::PolarZ => "polar-z",
            RuleKind::PolarC => "polar-c",
        })
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rm" => Ok(RuleKind::ReedMuller),
            "polar-z" | "cutoff" => Ok(RuleKind::PolarZ),
            "polar-c" | "capacity" => Ok(RuleKind::PolarC),
            other => Err(Error::parse(other, "expected rm, polar-z or polar-c")),
        }
    }
}

/// Top-`k` indices by score; ties go to the larger index.
pub fn build_data_index_set(rule: ScoreRule<'_>, n: usize, k: usize) -> Result<CodeSpec> {
    if k == 0 || k > n {
        return Err(Error::DimensionOutOfRange { k, n });
    }
    let scores: Vec<f64> = match rule {
        ScoreRule::ReedMuller => (0..n).map(|i| i.count_ones() as f64).collect(),
        ScoreRule::Capacity(s) | ScoreRule::Cutoff(s) if s.len() != n => {
            return Err(Error::LengthMismatch { expected: n, got: s.len() });
        }
        ScoreRule::Capacity(s) => s.capacity.clone(),
        ScoreRule::Cutoff(s) => s.cutoff.clone(),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(b.cmp(&a)));
    CodeSpec::new(n, &order[..k])
}

/// Cumulative data-position counts `K_0 = 0, K_i = |A ∩ {1..i}|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RateProfile(pub Vec<usize>);

/// Rate profile of a 0-based index set inside a length-`n` block.
pub fn rate_profile(indices: &[usize], n: usize) -> RateProfile {
    let mut marks = vec![0usize; n];
    for &i in indices {
        marks[i] = 1;
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(0);
    let mut acc = 0;
    for m in marks {
        acc += m;
        out.push(acc);
    }
    RateProfile(out)
}

/// Per-position additive metric bias.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Bias {
    /// `1 − r_j`, with `r_j = 1` on data positions and 0 elsewhere.
    #[default]
    RateProfile,
    /// Explicit bias per position.
    PerIndex(Vec<f64>),
}

impl Bias {
    /// `1 − R0(W_j)` per position: the correct path drifts up by
    /// `C(W_j) − R0(W_j) ≥ 0` in expectation at every position, and a
    /// diverged path drifts down by at least `R0(W_j)`.
    pub fn cutoff_rate(stats: &BitChannelStats) -> Self {
        Bias::PerIndex(stats.cutoff.iter().map(|r0| 1.0 - r0).collect())
    }
}

/// How a simulated PAC system derives its metric bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasRule {
    /// [`Bias::RateProfile`].
    RateProfile,
    /// [`Bias::cutoff_rate`] from the design channel's bit-channel statistics.
    #[default]
    Cutoff,
}

impl fmt::Display for BiasRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BiasRule::RateProfile => "rate-profile",
            BiasRule::Cutoff => "cutoff",
        })
    }
}

impl FromStr for BiasRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rate-profile" | "rate" => Ok(BiasRule::RateProfile),
            "cutoff" => Ok(BiasRule::Cutoff),
            other => Err(Error::parse(other, "expected rate-profile or cutoff")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanoParams {
    /// Threshold step in bits.
    pub delta: f64,
    pub bias: Bias,
    /// Forward-move budget per frame.
    pub max_visits: u64,
}

impl Default for FanoParams {
    fn default() -> Self {
        Self {
            delta: 2.0,
            bias: Bias::RateProfile,
            max_visits: 1_000_000,
        }
    }
}

/// `(N, K, A, c)` plus decoder parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PacSpec {
    pub code: CodeSpec,
    pub conv: ConvSpec,
    pub fano: FanoParams,
}

impl PacSpec {
    pub fn new(code: CodeSpec, conv: ConvSpec, fano: FanoParams) -> Result<Self> {
        if !(fano.delta > 0.0 && fano.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("threshold step {} must be positive", fano.delta)));
        }
        if fano.max_visits < code.n() as u64 {
            return Err(Error::InvalidArgument(format!(
                "visit budget {} below block length {}",
                fano.max_visits,
                code.n()
            )));
        }
        if let Bias::PerIndex(b) = &fano.bias {
            if b.len() != code.n() {
                return Err(Error::LengthMismatch { expected: code.n(), got: b.len() });
            }
        }
        Ok(Self { code, conv, fano })
    }

    pub(crate) fn bias_vector(&self) -> Vec<f64> {
        match &self.fano.bias {
            Bias::RateProfile => (0..self.code.n())
                .map(|j| if self.code.is_data(j) { 0.0 } else { 1.0 })
                .collect(),
            Bias::PerIndex(b) => b.clone(),
        }
    }
}

/// `x = (v·T)·P_n` with `v_A = d`.
pub fn pac_encode(d: &[u8], spec: &PacSpec) -> Result<Vec<u8>> {
    let v = spec.code.embed(d)?;
    let mut x = conv_encode(&v, &spec.conv);
    polar_transform_in_place(&mut x);
    Ok(x)
}
