//! The polar transform and the bit-channels it synthesizes.
//!
//! Bit-channels are indexed `0..N` internally; index `i` here is bit-channel
//! `i + 1` in the usual 1-based numbering. No bit-reversal is applied.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bmc::{cutoff_from_bhattacharyya, softplus, ChannelModel};
use crate::sc::{CheckNode, ScTree};
use crate::{log2_exact, Error, Result};

/// `x = u · P_n` over GF(2), in place. The length must be a power of two.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    debug_assert!(bits.len().is_power_of_two());
    let n = bits.len();
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (left, right) = block.split_at_mut(half);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l ^= *r;
            }
        }
        half *= 2;
    }
}

/// `x = u · P_n`, where `P_n` is the n-th Kronecker power of `[[1,0],[1,1]]`.
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    if log2_exact(u.len()).is_none() {
        return Err(Error::NotPowerOfTwo(u.len()));
    }
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x);
    Ok(x)
}

/// How a [`BitChannelStats`] table was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstructionMethod {
    ExactBec,
    MonteCarlo { samples: u64, seed: u64 },
}

/// Per-index capacity, Bhattacharyya parameter and cutoff rate of the
/// synthesized bit-channels.
#[derive(Debug, Clone, PartialEq)]
pub struct BitChannelStats {
    pub capacity: Vec<f64>,
    pub bhattacharyya: Vec<f64>,
    pub cutoff: Vec<f64>,
    /// Standard error of each Bhattacharyya estimate (Monte-Carlo only).
    pub bhattacharyya_stderr: Option<Vec<f64>>,
    pub method: ConstructionMethod,
}

impl BitChannelStats {
    pub fn len(&self) -> usize {
        self.capacity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.capacity.is_empty()
    }

    pub fn total_capacity(&self) -> f64 {
        self.capacity.iter().sum()
    }

    pub fn total_cutoff(&self) -> f64 {
        self.cutoff.iter().sum()
    }

    /// JSON document `{channel, N, method, samples, seed, rows: [...]}`
    /// with 1-based row indices.
    pub fn to_document(&self, channel: Option<&ChannelModel>) -> StatsDocument {
        let (method, samples, seed) = match self.method {
            ConstructionMethod::ExactBec => ("exact-bec", None, None),
            ConstructionMethod::MonteCarlo { samples, seed } => ("mc", Some(samples), Some(seed)),
        };
        StatsDocument {
            channel: channel.map(|c| c.to_string()),
            n: self.len(),
            method: method.to_string(),
            samples,
            seed,
            rows: (0..self.len())
                .map(|i| StatsRow {
                    i: i + 1,
                    capacity: self.capacity[i],
                    bhattacharyya: self.bhattacharyya[i],
                    cutoff: self.cutoff[i],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsDocument {
    pub channel: Option<String>,
    #[serde(rename = "N")]
    pub n: usize,
    pub method: String,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub rows: Vec<StatsRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub i: usize,
    pub capacity: f64,
    pub bhattacharyya: f64,
    pub cutoff: f64,
}

/// Exact erasure probabilities of the bit-channels of a BEC(ε):
/// `ε⁻ = 2ε − ε²` for the first half, `ε⁺ = ε²` for the second, recursively.
pub fn bec_bit_channels(erasure: f64, n: usize) -> Result<BitChannelStats> {
    if !(0.0..=1.0).contains(&erasure) {
        return Err(Error::InvalidChannel(format!("erasure probability {erasure} outside [0, 1]")));
    }
    let levels = log2_exact(n).ok_or(Error::NotPowerOfTwo(n))?;
    let mut z = Vec::with_capacity(n);
    z.push(erasure);
    for _ in 0..levels {
        z = z.iter().flat_map(|&e| [2.0 * e - e * e, e * e]).collect();
    }
    Ok(BitChannelStats {
        capacity: z.iter().map(|e| 1.0 - e).collect(),
        cutoff: z.iter().map(|&e| cutoff_from_bhattacharyya(e)).collect(),
        bhattacharyya: z,
        bhattacharyya_stderr: None,
        method: ConstructionMethod::ExactBec,
    })
}

/// Samples per independently seeded block in [`mc_bit_channels`].
const MC_BLOCK: u64 = 4096;

#[derive(Clone)]
struct Accum {
    cap: Vec<f64>,
    z: Vec<f64>,
    z2: Vec<f64>,
}

impl Accum {
    fn new(n: usize) -> Self {
        Self {
            cap: vec![0.0; n],
            z: vec![0.0; n],
            z2: vec![0.0; n],
        }
    }

    fn add(&mut self, other: &Accum) {
        for i in 0..self.cap.len() {
            self.cap[i] += other.cap[i];
            self.z[i] += other.z[i];
            self.z2[i] += other.z2[i];
        }
    }
}

/// Genie-aided Monte-Carlo estimate of the bit-channels of `channel`.
///
/// The all-zero word is sent, the SC recursion runs with the true (zero)
/// past decisions, and per index the LLR samples `L_i` give
/// `C_i ≈ mean(1 − log2(1 + e^{−L_i}))` and `Z_i ≈ mean(e^{−L_i/2})`.
/// Samples are drawn in fixed blocks, each from its own stream derived
/// from `(seed, block)`, so the result does not depend on thread count.
pub fn mc_bit_channels(channel: &ChannelModel, n: usize, samples: u64, seed: u64) -> Result<BitChannelStats> {
    let levels = log2_exact(n).ok_or(Error::NotPowerOfTwo(n))?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    let partials: Vec<Accum> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let count = MC_BLOCK.min(samples - block * MC_BLOCK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(block);
            let mut tree = ScTree::new(levels, CheckNode::Exact);
            let mut acc = Accum::new(n);
            let mut llrs = vec![0.0; n];
            for _ in 0..count {
                for l in llrs.iter_mut() {
                    *l = channel.transmit_llr(0, &mut rng);
                }
                tree.load(&llrs);
                for i in 0..n {
                    let l = tree.leaf_llr(i);
                    let zs = (-l / 2.0).exp();
                    acc.cap[i] += 1.0 - softplus(-l) / std::f64::consts::LN_2;
                    acc.z[i] += zs;
                    acc.z2[i] += zs * zs;
                }
            }
            acc
        })
        .collect();
    let mut total = Accum::new(n);
    for p in &partials {
        total.add(p);
    }
    let s = samples as f64;
    let capacity: Vec<f64> = total.cap.iter().map(|c| (c / s).clamp(0.0, 1.0)).collect();
    let bhattacharyya: Vec<f64> = total.z.iter().map(|z| (z / s).clamp(0.0, 1.0)).collect();
    let stderr = (0..n)
        .map(|i| {
            let mean = total.z[i] / s;
            let var = (total.z2[i] / s - mean * mean).max(0.0);
            (var / s).sqrt()
        })
        .collect();
    Ok(BitChannelStats {
        cutoff: bhattacharyya.iter().map(|&z| cutoff_from_bhattacharyya(z)).collect(),
        capacity,
        bhattacharyya,
        bhattacharyya_stderr: Some(stderr),
        method: ConstructionMethod::MonteCarlo { samples, seed },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub i: usize,
    pub pol_cap: f64,
    pub pol_r0: f64,
    pub unpol_cap: f64,
    pub unpol_r0: f64,
}

/// Cumulative capacity and cutoff-rate profiles, rows `i = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub rows: Vec<ProfileRow>,
}

pub fn profiles(stats: &BitChannelStats, channel: &ChannelModel) -> ProfileTable {
    let (c, r0) = (channel.capacity(), channel.cutoff_rate());
    let mut rows = Vec::with_capacity(stats.len() + 1);
    let (mut cap, mut cut) = (0.0, 0.0);
    rows.push(ProfileRow {
        i: 0,
        pol_cap: 0.0,
        pol_r0: 0.0,
        unpol_cap: 0.0,
        unpol_r0: 0.0,
    });
    for i in 0..stats.len() {
        cap += stats.capacity[i];
        cut += stats.cutoff[i];
        let k = (i + 1) as f64;
        rows.push(ProfileRow {
            i: i + 1,
            pol_cap: cap,
            pol_r0: cut,
            unpol_cap: k * c,
            unpol_r0: k * r0,
        });
    }
    ProfileTable { rows }
}

impl ProfileTable {
    pub fn last(&self) -> &ProfileRow {
        self.rows.last().expect("profile has a row for i = 0")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,pol_cap,pol_r0,unpol_cap,unpol_r0\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.i, r.pol_cap, r.pol_r0, r.unpol_cap, r.unpol_r0));
        }
        out
    }
}

/// Fractions of bit-channels with capacity above `1 − δ`, in between,
/// and below `δ`.
pub fn polarization_fractions(stats: &BitChannelStats, delta: f64) -> Result<(f64, f64, f64)> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 1/2)")));
    }
    let n = stats.len() as f64;
    let high = stats.capacity.iter().filter(|&&c| c > 1.0 - delta).count() as f64 / n;
    let low = stats.capacity.iter().filter(|&&c| c < delta).count() as f64 / n;
    Ok((high, 1.0 - high - low, low))
}
