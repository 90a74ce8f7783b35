//! Nyström discretization of `a(x) k(x, y) b(y)` integral operators.
//!
//! Matrices are returned in the symmetrically weighted form
//! `W^{1/2} M W^{-1/2}`, which is similar to the plain Nyström matrix `M`.

use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::C0;
use super::linalg::CMatrix;
use super::quadrature::{gauss_legendre_rule, QuadratureGrid};
use crate::error::Result;

/// How the diagonal kink of the kernel is treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NystromRule {
    /// `sqrt(w_i) a_i k(x_i, x_j) b_j sqrt(w_j)`. Entrywise dominated by the
    /// same rule applied to any kernel dominating `|k|`.
    #[default]
    Plain,
    /// Product-integration correction on the panel holding `x_i`: the panel
    /// is split at `x_i` and integrated with Gauss-Legendre sub-rules, the
    /// integrand being interpolated from the panel nodes. Restores high order
    /// for kernels with a derivative jump across `x = y`.
    Corrected,
}

/// Assemble the weighted Nyström matrix of `a(x) k(x, y) b(y)`.
pub fn assemble<K>(grid: &QuadratureGrid, a: &[f64], b: &[c64], kernel: K, rule: NystromRule) -> Result<CMatrix>
where
    K: Fn(f64, f64) -> c64 + Sync,
{
    let n = grid.len();
    assert_eq!(a.len(), n);
    assert_eq!(b.len(), n);
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let rows: Vec<Vec<c64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![C0; n];
            if a[i] == 0.0 {
                return row;
            }
            let xi = grid.nodes[i];
            for j in 0..n {
                if b[j] != C0 {
                    row[j] = kernel(xi, grid.nodes[j]) * (a[i] * sw[i] * sw[j]) * b[j];
                }
            }
            if rule == NystromRule::Corrected {
                let p = grid.panels[grid.panel_of(i)];
                let q = corrected_row(grid, &p, i, &kernel);
                for (k, qk) in q.into_iter().enumerate() {
                    let j = p.start + k;
                    // q holds unweighted product-integration weights; the
                    // similarity transform gives sqrt(w_i) / sqrt(w_j).
                    row[j] = qk * (a[i] * sw[i] / sw[j]) * b[j];
                }
            }
            row
        })
        .collect();
    CMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Weights `q_k` with `sum_k q_k f(x_k) ~ int_panel k(x_i, y) f(y) dy` for `f`
/// smooth on the panel.
fn corrected_row<K>(grid: &QuadratureGrid, p: &super::quadrature::Panel, i: usize, kernel: &K) -> Vec<c64>
where
    K: Fn(f64, f64) -> c64,
{
    let xs = &grid.nodes[p.start..p.start + p.order];
    let xi = grid.nodes[i];
    let m = p.order.max(2) + 2;
    let (t, w) = gauss_legendre_rule(m);
    let mut q = vec![C0; p.order];
    for (lo, hi) in [(p.lo, xi), (xi, p.hi)] {
        let half = 0.5 * (hi - lo);
        if half <= 0.0 {
            continue;
        }
        let mid = 0.5 * (hi + lo);
        for (ts, ws) in t.iter().zip(&w) {
            let y = mid + half * ts;
            let kw = kernel(xi, y) * (half * ws);
            for (k, qk) in q.iter_mut().enumerate() {
                *qk += kw * lagrange(xs, k, y);
            }
        }
    }
    q
}

fn lagrange(xs: &[f64], k: usize, y: f64) -> f64 {
    xs.iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .fold(1.0, |acc, (_, &xj)| acc * (y - xj) / (xs[k] - xj))
}
