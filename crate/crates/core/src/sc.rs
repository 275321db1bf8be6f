//! Successive-cancellation LLR tree.
//!
//! Leaves are the bits `u_0..u_{N-1}` of the polar transform input in
//! natural order. For a node covering `2h` leaves with parent LLRs `P`,
//! the left child sees `f(P[j], P[j+h])` and the right child sees
//! `g(P[j], P[j+h], β[j])`, where `β` is the polar transform of the left
//! child's decided bits.
//!
//! One node per level is cached. A node's LLRs depend only on the
//! decisions that precede its first leaf, so [`ScTree::set_decision`]
//! invalidates exactly the cached nodes that start after the changed
//! position. This makes the tree usable both for a single left-to-right
//! pass and for the random back-and-forth access of sequential decoding.

use serde::{Deserialize, Serialize};

use crate::polarize::polar_transform_in_place;

/// Check-node rule used by the `f` combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckNode {
    /// `2·artanh(tanh(a/2)·tanh(b/2))`, evaluated in a stable log form.
    #[default]
    Exact,
    /// `sign(a)·sign(b)·min(|a|, |b|)`.
    MinSum,
}

impl CheckNode {
    #[inline]
    pub fn combine(self, a: f64, b: f64) -> f64 {
        match self {
            CheckNode::Exact => check_exact(a, b),
            CheckNode::MinSum => check_min_sum(a, b),
        }
    }
}

/// Exact check-node combine: `ln((1 + e^{a+b}) / (e^a + e^b))`.
#[inline]
pub fn check_exact(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let (a, b) = (a.abs(), b.abs());
    sign * (a.min(b) + (-(a + b)).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p())
}

#[inline]
pub fn check_min_sum(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

/// Variable-node combine `b + (1 − 2u)·a`.
#[inline]
pub fn variable(a: f64, b: f64, u: u8) -> f64 {
    if u == 0 {
        b + a
    } else {
        b - a
    }
}

/// Hard decision on an LLR; a zero LLR decides 0.
#[inline]
pub fn hard_decision(llr: f64) -> u8 {
    (llr < 0.0) as u8
}

#[derive(Debug, Clone)]
pub struct ScTree {
    levels: usize,
    check: CheckNode,
    /// `alpha[l]` holds the LLRs (length `2^l`) of the cached node at level `l`;
    /// `alpha[levels]` holds the channel LLRs.
    alpha: Vec<Vec<f64>>,
    cached: Vec<Option<usize>>,
    decisions: Vec<u8>,
    partial: Vec<u8>,
}

impl ScTree {
    /// Tree for block length `2^levels`.
    pub fn new(levels: usize, check: CheckNode) -> Self {
        Self {
            levels,
            check,
            alpha: (0..=levels).map(|l| vec![0.0; 1 << l]).collect(),
            cached: vec![None; levels + 1],
            decisions: vec![0; 1 << levels],
            partial: vec![0; 1 << levels],
        }
    }

    pub fn len(&self) -> usize {
        1 << self.levels
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check_node(&self) -> CheckNode {
        self.check
    }

    /// Loads channel LLRs and clears all decisions. Panics on a length mismatch.
    pub fn load(&mut self, llrs: &[f64]) {
        assert_eq!(llrs.len(), self.len(), "channel LLR length");
        self.alpha[self.levels].copy_from_slice(llrs);
        self.cached.fill(None);
        self.cached[self.levels] = Some(0);
        self.decisions.fill(0);
    }

    pub fn decisions(&self) -> &[u8] {
        &self.decisions
    }

    /// Records `u_i`. Cached nodes whose first leaf is after `i` are dropped.
    pub fn set_decision(&mut self, i: usize, bit: u8) {
        self.decisions[i] = bit;
        for (level, slot) in self.cached.iter_mut().enumerate() {
            if let Some(node) = *slot {
                if node << level > i {
                    *slot = None;
                }
            }
        }
    }

    /// LLR of bit-channel `i` given the recorded decisions `u_0..u_{i-1}`.
    pub fn leaf_llr(&mut self, i: usize) -> f64 {
        self.ensure(0, i);
        self.alpha[0][0]
    }

    fn ensure(&mut self, level: usize, node: usize) {
        if self.cached[level] == Some(node) {
            return;
        }
        self.ensure(level + 1, node >> 1);
        let half = 1usize << level;
        let (lower, upper) = self.alpha.split_at_mut(level + 1);
        let out = &mut lower[level];
        let parent = &upper[0];
        if node & 1 == 0 {
            let check = self.check;
            for j in 0..half {
                out[j] = check.combine(parent[j], parent[j + half]);
            }
        } else {
            let start = (node - 1) * half;
            let beta = &mut self.partial[..half];
            beta.copy_from_slice(&self.decisions[start..start + half]);
            polar_transform_in_place(beta);
            for j in 0..half {
                out[j] = variable(parent[j], parent[j + half], beta[j]);
            }
        }
        self.cached[level] = Some(node);
    }
}
