//! Fano sequential decoding over the irregular PAC tree.
//!
//! Depth `j` of the tree is the position of carrier bit `v_j`. Data
//! positions branch in two, frozen positions have the single branch
//! `v_j = 0`. The branch label is the convolution output `u_j`, and its
//! metric is
//!
//! ```text
//! m_j = log2 Pr(U_j = u_j | y, û_0..û_{j-1}) + bias_j
//! ```
//!
//! with the probability taken from the SC LLR recursion. With the default
//! bias `1 − r_j` the expected increment on the correct path is
//! `C(W_j) − r_j`, so the path metric drifts up while the rate profile
//! stays below the capacity profile.

use std::f64::consts::LN_2;

use super::PacSpec;
use crate::bmc::softplus;
use crate::sc::{CheckNode, ScTree};
use crate::{Error, Result};

/// `log2 Pr(U = u)` for a bit-channel LLR, plus `bias`.
#[inline]
pub fn branch_metric(llr: f64, u: u8, bias: f64) -> f64 {
    let signed = if u == 0 { llr } else { -llr };
    bias - softplus(-signed) / LN_2
}

/// Branch metrics along a path, backed by the SC tree.
#[derive(Debug, Clone)]
pub struct MetricCalculator {
    tree: ScTree,
    bias: Vec<f64>,
}

impl MetricCalculator {
    pub fn new(spec: &PacSpec, check: CheckNode) -> Self {
        Self {
            tree: ScTree::new(spec.code.levels(), check),
            bias: spec.bias_vector(),
        }
    }

    pub fn load(&mut self, llrs: &[f64]) {
        self.tree.load(llrs);
    }

    /// Bit-channel LLR at `j` given the committed `u_0..u_{j-1}`.
    pub fn llr(&mut self, j: usize) -> f64 {
        self.tree.leaf_llr(j)
    }

    /// Metric of hypothesis `u` at position `j`.
    pub fn metric(&mut self, j: usize, u: u8) -> f64 {
        let l = self.tree.leaf_llr(j);
        branch_metric(l, u, self.bias[j])
    }

    /// Commits `u_j`, discarding cached state that depended on the old value.
    pub fn commit(&mut self, j: usize, u: u8) {
        self.tree.set_decision(j, u);
    }
}

/// Result of one Fano decoding run.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoOutcome {
    /// `v̂_A`; meaningless when `exhausted` is set.
    pub data: Vec<u8>,
    /// Number of forward moves made.
    pub visits: u64,
    pub exhausted: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct Branch {
    v: u8,
    u: u8,
    metric: f64,
}

/// Fano decoder with per-instance scratch buffers.
#[derive(Debug, Clone)]
pub struct FanoDecoder {
    spec: PacSpec,
    calc: MetricCalculator,
    v: Vec<u8>,
    path_metric: Vec<f64>,
    branches: Vec<[Branch; 2]>,
    branch_count: Vec<u8>,
    choice: Vec<u8>,
}

impl FanoDecoder {
    pub fn new(spec: PacSpec, check: CheckNode) -> Self {
        let n = spec.code.n();
        Self {
            calc: MetricCalculator::new(&spec, check),
            spec,
            v: vec![0; n],
            path_metric: vec![0.0; n + 1],
            branches: vec![[Branch::default(); 2]; n],
            branch_count: vec![0; n],
            choice: vec![0; n],
        }
    }

    pub fn spec(&self) -> &PacSpec {
        &self.spec
    }

    /// Computes the ordered branches leaving depth `j` for the current prefix.
    fn expand(&mut self, j: usize) {
        let feedback = self.spec.conv.feedback(&self.v, j);
        let llr = self.calc.llr(j);
        let bias = self.calc.bias[j];
        let make = |v: u8| {
            let u = v ^ feedback;
            Branch { v, u, metric: branch_metric(llr, u, bias) }
        };
        if self.spec.code.is_data(j) {
            let (b0, b1) = (make(0), make(1));
            // higher metric first, ties to v = 0
            self.branches[j] = if b1.metric > b0.metric { [b1, b0] } else { [b0, b1] };
            self.branch_count[j] = 2;
        } else {
            self.branches[j][0] = make(0);
            self.branch_count[j] = 1;
        }
    }

    pub fn decode(&mut self, llrs: &[f64]) -> Result<FanoOutcome> {
        let n = self.spec.code.n();
        if llrs.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: llrs.len() });
        }
        let delta = self.spec.fano.delta;
        let budget = self.spec.fano.max_visits;
        self.calc.load(llrs);
        self.v.fill(0);

        let mut threshold = 0.0;
        let mut depth = 0usize;
        let mut which = 0usize;
        let mut visits = 0u64;
        let mut exhausted = false;
        self.path_metric[0] = 0.0;
        self.expand(0);

        loop {
            // look forward
            if which < self.branch_count[depth] as usize {
                let b = self.branches[depth][which];
                let forward = self.path_metric[depth] + b.metric;
                if forward >= threshold {
                    visits += 1;
                    if visits > budget {
                        exhausted = true;
                        break;
                    }
                    self.v[depth] = b.v;
                    self.choice[depth] = which as u8;
                    self.calc.commit(depth, b.u);
                    self.path_metric[depth + 1] = forward;
                    let first_visit = self.path_metric[depth] < threshold + delta;
                    depth += 1;
                    if depth == n {
                        break;
                    }
                    if first_visit {
                        while forward >= threshold + delta {
                            threshold += delta;
                        }
                    }
                    self.expand(depth);
                    which = 0;
                    continue;
                }
            }
            // look back
            loop {
                if depth == 0 || self.path_metric[depth - 1] < threshold {
                    threshold -= delta;
                    which = 0;
                    break;
                }
                depth -= 1;
                if self.choice[depth] == 0 && self.branch_count[depth] == 2 {
                    which = 1;
                    break;
                }
            }
        }

        Ok(FanoOutcome {
            data: self.spec.code.extract(&self.v),
            visits,
            exhausted,
        })
    }
}

/// Fano decoding with the exact check-node rule.
pub fn fano_decode(llrs: &[f64], spec: &PacSpec) -> Result<FanoOutcome> {
    FanoDecoder::new(spec.clone(), CheckNode::Exact).decode(llrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmc::{ChannelModel, LLR_MAX};
    use crate::pac::{build_data_index_set, pac_encode, ConvSpec, FanoParams, ScoreRule};
    use crate::polar::CodeSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rm_spec(n: usize, k: usize, max_visits: u64) -> PacSpec {
        let code = build_data_index_set(ScoreRule::ReedMuller, n, k).unwrap();
        let fano = FanoParams { max_visits, ..FanoParams::default() };
        PacSpec::new(code, ConvSpec::default(), fano).unwrap()
    }

    #[test]
    fn metric_limits() {
        // certain frozen bit
        assert!((branch_metric(LLR_MAX, 0, 1.0) - 1.0).abs() < 1e-12);
        // certain data bit
        assert!(branch_metric(LLR_MAX, 0, 0.0).abs() < 1e-12);
        let wrong = branch_metric(LLR_MAX, 1, 0.0);
        assert!((wrong + LLR_MAX / LN_2).abs() < 1e-9, "{wrong}");
        // erasure
        assert_eq!(branch_metric(0.0, 0, 0.0), -1.0);
        assert_eq!(branch_metric(0.0, 1, 0.0), -1.0);
    }

    #[test]
    fn metric_calculator_uses_rate_profile_bias() {
        let spec = rm_spec(8, 4, 1000);
        let mut calc = MetricCalculator::new(&spec, CheckNode::Exact);
        calc.load(&[LLR_MAX; 8]);
        // position 0 is frozen: log2(~1) + 1
        assert!((calc.metric(0, 0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn noiseless_single_pass() {
        let spec = rm_spec(128, 64, 1_000_000);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut dec = FanoDecoder::new(spec.clone(), CheckNode::Exact);
        for _ in 0..20 {
            let d: Vec<u8> = (0..64).map(|_| rng.random_range(0..2)).collect();
            let x = pac_encode(&d, &spec).unwrap();
            let llrs: Vec<f64> = x.iter().map(|&b| if b == 0 { LLR_MAX } else { -LLR_MAX }).collect();
            let out = dec.decode(&llrs).unwrap();
            assert_eq!(out, FanoOutcome { data: d, visits: 128, exhausted: false });
        }
    }

    #[test]
    fn budget_boundary_exhausts() {
        let n = 64;
        let spec = rm_spec(n, 32, n as u64);
        let ch = ChannelModel::biawgn_snr_db(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut dec = FanoDecoder::new(spec.clone(), CheckNode::Exact);
        let mut seen_exhausted = 0;
        for _ in 0..50 {
            let d: Vec<u8> = (0..32).map(|_| rng.random_range(0..2)).collect();
            let x = pac_encode(&d, &spec).unwrap();
            let llrs: Vec<f64> = x.iter().map(|&b| ch.transmit_llr(b, &mut rng)).collect();
            let out = dec.decode(&llrs).unwrap();
            // with budget N any backtrack exhausts; otherwise exactly N visits
            assert!(out.exhausted || out.visits == n as u64);
            seen_exhausted += out.exhausted as u32;
        }
        assert!(seen_exhausted > 0);
    }

    #[test]
    fn decodes_moderate_noise() {
        let spec = rm_spec(64, 32, 100_000);
        let ch = ChannelModel::biawgn_snr_db(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut dec = FanoDecoder::new(spec.clone(), CheckNode::Exact);
        let mut errors = 0;
        for _ in 0..200 {
            let d: Vec<u8> = (0..32).map(|_| rng.random_range(0..2)).collect();
            let x = pac_encode(&d, &spec).unwrap();
            let llrs: Vec<f64> = x.iter().map(|&b| ch.transmit_llr(b, &mut rng)).collect();
            errors += (dec.decode(&llrs).unwrap().data != d) as u32;
        }
        assert!(errors <= 2, "{errors}");
    }

    #[test]
    fn length_mismatch() {
        let spec = PacSpec::new(
            CodeSpec::from_one_based(8, &[4, 6, 7, 8]).unwrap(),
            ConvSpec::default(),
            FanoParams::default(),
        )
        .unwrap();
        assert!(fano_decode(&[0.0; 4], &spec).is_err());
    }
}
