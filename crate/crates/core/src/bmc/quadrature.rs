//! Gauss–Hermite quadrature for expectations over a standard normal.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Default node count for BIAWGN integrals.
pub const DEFAULT_NODES: usize = 129;

/// Nodes and weights for `∫ e^{-t²} f(t) dt ≈ Σ w_i f(t_i)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Computes an `n`-point rule from the eigen-decomposition of the
    /// Hermite Jacobi matrix (Golub–Welsch). Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Hermite rule needs at least one node");
        let mut diag = vec![0.0; n];
        let mut off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        off.push(0.0);
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        tridiagonal_ql(&mut diag, &mut off, &mut first);

        let mut pairs: Vec<(f64, f64)> = diag
            .into_iter()
            .zip(first)
            .map(|(x, v)| (x, PI.sqrt() * v * v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // enforce exact symmetry about zero
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = (pairs[j].0 - pairs[i].0) / 2.0;
            let w = (pairs[i].1 + pairs[j].1) / 2.0;
            pairs[i] = (-x, w);
            pairs[j] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        let (nodes, weights) = pairs.into_iter().unzip();
        Self { nodes, weights }
    }

    /// Shared default rule with [`DEFAULT_NODES`] nodes.
    pub fn default_rule() -> &'static GaussHermite {
        static RULE: OnceLock<GaussHermite> = OnceLock::new();
        RULE.get_or_init(|| GaussHermite::new(DEFAULT_NODES))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[f(Z)]` for `Z ~ N(0, 1)`.
    pub fn expect_std_normal(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(std::f64::consts::SQRT_2 * t))
            .sum();
        sum / PI.sqrt()
    }
}

/// Implicit QL iteration for a symmetric tridiagonal matrix with diagonal
/// `d` and sub-diagonal `e` (`e[i]` couples `i` and `i + 1`, last entry
/// unused). On return `d` holds the eigenvalues and `row` the first row of
/// the eigenvector matrix (start it as the first row of the identity).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], row: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 200, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let t = row[i + 1];
                row[i + 1] = s * row[i] + c * t;
                row[i] = c * row[i] - s * t;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
