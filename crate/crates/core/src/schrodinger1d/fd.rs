//! Finite-difference oracle with exact exterior boundary conditions.
//!
//! Outside the truncation interval the potential vanishes, so an eigenfunction
//! decays like `exp(-k |x|)` with `k = sqrt(-lambda)`. Imposing `u' = k u` at
//! the left end and `u' = -k u` at the right end through ghost points gives a
//! quadratic eigenvalue problem in `k` for the second-order central-difference
//! operator. There are no box modes, and the `O(h^2)` error is removed by
//! Richardson extrapolation between two resolutions.

use faer::c64;
use serde::{Deserialize, Serialize};

use super::hunt::CUT_MARGIN;
use super::kernel::davies_containment;
use super::potential::PotentialSpec;
use crate::error::Result;
use crate::numerics::quadrature::Domain;
use crate::numerics::{C0, C1};
use crate::spectral::{hunt_roots, secant, EigenEstimate, HuntOptions, Method, SearchRect, SpectralReport};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    /// Intervals of the first refined resolution; the second uses twice as many.
    pub n_fd: usize,
    /// Intervals of the grid whose full quadratic eigenproblem seeds the search.
    pub coarse: usize,
    /// Allowed drift between the two refined resolutions.
    pub stability_tol: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { n_fd: 4000, coarse: 300, stability_tol: 1e-4 }
    }
}

/// Node values of the cell-averaged potential on `n` intervals. The end
/// nodes own only the half cell inside the domain.
fn sampled(p: &PotentialSpec, d: &Domain, n: usize) -> (f64, Vec<c64>) {
    let h = d.length() / n as f64;
    let v = (0..=n)
        .map(|j| match j {
            0 => p.cell_average(d.lo + 0.25 * h, 0.5 * h),
            j if j == n => p.cell_average(d.hi - 0.25 * h, 0.5 * h),
            j => p.cell_average(d.lo + j as f64 * h, h),
        })
        .collect();
    (h, v)
}

/// `det(h^2 T(k))` for the tridiagonal `T(k) = L + V + k C + k^2`, by the
/// pivot recurrence.
fn det_t(h: f64, v: &[c64], k: c64) -> c64 {
    let n = v.len() - 1;
    let h2 = h * h;
    let kk = k * k;
    let diag = |j: usize| -> c64 {
        let mut d = c64::new(2.0, 0.0) + (v[j] + kk) * h2;
        if j == 0 || j == n {
            d += k * (2.0 * h);
        }
        d
    };
    // Off-diagonal products: 2 on the boundary couplings, 1 in the interior.
    let off = |j: usize| -> f64 {
        if j == 0 || j + 1 == n {
            2.0
        } else {
            1.0
        }
    };
    let mut det = C1;
    let mut pivot = diag(0);
    for j in 1..=n {
        det *= pivot;
        if pivot == C0 {
            return C0;
        }
        pivot = diag(j) - c64::new(off(j - 1), 0.0) / pivot;
    }
    det * pivot
}

/// `det T(k) / det T_0(k)` with `T_0` the free operator on the same grid.
/// The free determinant has no zeros for `Re k > 0` and carries the
/// exponential growth in `k L`, so the ratio stays well scaled on long
/// domains.
fn det_ratio(h: f64, v: &[c64], k: c64) -> c64 {
    det_t(h, v, k) / det_t(h, &vec![C0; v.len()], k)
}

/// Eigenvalues off `[0, inf)` from the exterior-condition finite-difference
/// discretization on `domain`.
pub fn fd_oracle(p: &PotentialSpec, domain: Domain, opts: &FdOptions) -> Result<SpectralReport> {
    p.check_truncation(&domain)?;
    let mut report = SpectralReport::default();
    if p.is_zero() {
        report.certificates.push(davies_containment(p, &[]));
        return Ok(report);
    }
    let (hc, vc) = sampled(p, &domain, opts.coarse);
    // Scan k = sqrt(-lambda) over |lambda| <= 4 (||V||_inf + ||V||_1^2) + 1,
    // a generous multiple of every a priori bound.
    let s = (4.0 * (p.sup_norm() + p.l1_norm().powi(2)) + 1.0).sqrt();
    let rect = SearchRect::new(1e-3 * s, s, -s, s)?;
    let det_c = |k: c64| -> Result<c64> { Ok(det_ratio(hc, &vc, k)) };
    let hunt = HuntOptions { nx: 61, ny: 121, tol: 1e-11, ..HuntOptions::default() };
    let (re_min, im_min, im_max) = p.value_bounds();
    let margin = 1e-2 * (1.0 + p.sup_norm());
    // Eigenvalues lie in the numerical range {Re >= min Re V, min Im V <= Im <= max Im V}.
    let seeds: Vec<c64> = hunt_roots(&det_c, &rect, &hunt)?
        .into_iter()
        .map(|r| r.lambda)
        .filter(|k| {
            let l = -k * k;
            l.re >= re_min - margin && l.im >= im_min - margin && l.im <= im_max + margin
        })
        .collect();

    let (h1, v1) = sampled(p, &domain, opts.n_fd);
    let (h2, v2) = sampled(p, &domain, 2 * opts.n_fd);
    let mut found: Vec<EigenEstimate> = vec![];
    for k0 in seeds {
        let step = 1e-4 * k0.norm().max(1e-2);
        let solve = |h: f64, v: &[c64], k: c64| -> Option<c64> {
            let f = |k: c64| -> Result<c64> { Ok(det_ratio(h, v, k)) };
            // The pivot recurrence carries O(N eps) rounding, so ask for less than
            // full precision.
            let c = secant(&f, k, step, &[], 1e-11, 80).ok()?;
            c.converged.then_some(c.lambda)
        };
        let Some(k1) = solve(h1, &v1, k0) else { continue };
        let Some(k2) = solve(h2, &v2, k1) else { continue };
        let (l1, l2) = (-k1 * k1, -k2 * k2);
        let extrapolated = (l2 * 4.0 - l1) / 3.0;
        let est = EigenEstimate {
            lambda: extrapolated,
            residual: (l2 - l1).norm(),
            method: Method::FdOracle,
            grid_n: 2 * opts.n_fd,
            refined: Some(l2),
            k_norm: None,
        };
        if found.iter().chain(&report.rejected).any(|e| (e.lambda - extrapolated).norm() <= 1e-8 * extrapolated.norm().max(1.0)) {
            continue;
        }
        let off_cut = k2.re > 0.0 && crate::spectral::distance_to_half_line(extrapolated, 0.0) >= CUT_MARGIN;
        if est.residual <= opts.stability_tol && off_cut {
            found.push(est);
        } else {
            report.rejected.push(est);
        }
    }
    report.eigenvalues = found;
    report.sort();
    report.certificates.push(davies_containment(p, &report.lambdas()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;
    use crate::numerics::linalg::CMatrix;

    #[test]
    fn pivot_determinant_matches_dense() {
        let v: Vec<c64> = (0..7).map(|j| c(0.1 * j as f64, -0.2)).collect();
        let h = 0.3;
        let k = c(0.7, 0.2);
        let n = v.len() - 1;
        let t = CMatrix::from_fn(n + 1, n + 1, |i, j| {
            if i == j {
                let mut d = c(2.0, 0.0) + (v[i] + k * k) * (h * h);
                if i == 0 || i == n {
                    d += k * (2.0 * h);
                }
                d
            } else if i.abs_diff(j) == 1 {
                c(if i == 0 || i == n { -2.0 } else { -1.0 }, 0.0)
            } else {
                C0
            }
        })
        .unwrap();
        let dense = t.as_faer().determinant();
        assert!((det_t(h, &v, k) - dense).norm() <= 1e-12 * dense.norm());
    }
}

