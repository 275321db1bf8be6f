//! Polar codes: data-index selection, encoding, SC and CA-SCL decoding.

mod crc;
mod decode;

use serde::{Deserialize, Serialize};

use crate::polarize::{polar_transform_in_place, BitChannelStats};
use crate::{log2_exact, Error, Result};

pub use crc::CrcSpec;
pub use decode::{sc_decode, scl_decode, ListDecoder, ScDecoder};

/// Block length `N = 2^n`, dimension `K` and data index set `A`.
///
/// Indices are stored 0-based; [`CodeSpec::one_based`] and the JSON form
/// use the 1-based numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    n: usize,
    data: Vec<usize>,
    is_data: Vec<bool>,
}

impl CodeSpec {
    /// Builds a spec from 0-based indices (any order, no duplicates).
    pub fn new(n: usize, indices: &[usize]) -> Result<Self> {
        let levels = log2_exact(n).ok_or(Error::NotPowerOfTwo(n))?;
        if levels == 0 {
            return Err(Error::InvalidArgument("block length must be at least 2".into()));
        }
        let mut is_data = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::InvalidArgument(format!("index {} outside 1..={n}", i + 1)));
            }
            if std::mem::replace(&mut is_data[i], true) {
                return Err(Error::InvalidArgument(format!("duplicate index {}", i + 1)));
            }
        }
        if indices.is_empty() {
            return Err(Error::DimensionOutOfRange { k: 0, n });
        }
        let data = (0..n).filter(|&i| is_data[i]).collect();
        Ok(Self { n, data, is_data })
    }

    pub fn from_one_based(n: usize, indices: &[usize]) -> Result<Self> {
        let zero: Vec<usize> = indices
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| Error::InvalidArgument("index 0 in 1-based set".into())))
            .collect::<Result<_>>()?;
        Self::new(n, &zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.data.len()
    }

    pub fn levels(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n as f64
    }

    /// Sorted 0-based data indices.
    pub fn data_indices(&self) -> &[usize] {
        &self.data
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.data.iter().map(|i| i + 1).collect()
    }

    pub fn is_data(&self, i: usize) -> bool {
        self.is_data[i]
    }

    pub fn data_mask(&self) -> &[bool] {
        &self.is_data
    }

    /// Carrier word with `u_A = d` in increasing index order and zeros elsewhere.
    pub fn embed(&self, d: &[u8]) -> Result<Vec<u8>> {
        if d.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), got: d.len() });
        }
        let mut u = vec![0u8; self.n];
        for (&i, &bit) in self.data.iter().zip(d) {
            u[i] = bit;
        }
        Ok(u)
    }

    /// `u_A`.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        self.data.iter().map(|&i| u[i]).collect()
    }
}

/// JSON form of a code: `{type, N, K, A (sorted, 1-based), crc?, list?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeDocument {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub crc: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub list: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub conv: Option<String>,
}

impl CodeDocument {
    pub fn new(kind: &str, spec: &CodeSpec) -> Self {
        Self {
            kind: kind.to_string(),
            n: spec.n(),
            k: spec.k(),
            a: spec.one_based(),
            crc: None,
            list: None,
            conv: None,
        }
    }

    pub fn spec(&self) -> Result<CodeSpec> {
        let spec = CodeSpec::from_one_based(self.n, &self.a)?;
        if spec.k() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: spec.k() });
        }
        Ok(spec)
    }
}

/// The `k` indices with the smallest Bhattacharyya parameters; ties go to
/// the smaller index.
pub fn select_data_indices(stats: &BitChannelStats, k: usize) -> Result<CodeSpec> {
    select_by(&stats.bhattacharyya, k, |a, b| a.total_cmp(b))
}

/// The `k` indices with the largest cutoff rates; ties go to the smaller index.
pub fn select_by_cutoff(stats: &BitChannelStats, k: usize) -> Result<CodeSpec> {
    select_by(&stats.cutoff, k, |a, b| b.total_cmp(a))
}

fn select_by(values: &[f64], k: usize, better: impl Fn(&f64, &f64) -> std::cmp::Ordering) -> Result<CodeSpec> {
    let n = values.len();
    if k == 0 || k > n {
        return Err(Error::DimensionOutOfRange { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| better(&values[a], &values[b]).then(a.cmp(&b)));
    CodeSpec::new(n, &order[..k])
}

/// `x = u · P_n` with `u_A = d`.
pub fn encode(d: &[u8], spec: &CodeSpec) -> Result<Vec<u8>> {
    let mut u = spec.embed(d)?;
    polar_transform_in_place(&mut u);
    Ok(u)
}

/// `Σ_{i∈A} Z(W_i)` over 0-based indices, an upper bound on the SC
/// frame-error probability.
pub fn union_bound(stats: &BitChannelStats, indices: &[usize]) -> f64 {
    indices.iter().map(|&i| stats.bhattacharyya[i]).sum()
}
