use faer::c64;

use super::kernel::assemble_k_h3;
use super::potential::HyperbolicRadialPotential;
use crate::error::Result;
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{c, C0, C1};
use crate::schrodinger1d::{BsOptions, FdOptions, CUT_MARGIN};
use crate::spectral::{distance_to_half_line, hunt_roots, secant, EigenEstimate, HuntOptions, Method, SearchRect, SpectralReport};

/// Rectangles covering `[re_min, re_max] x [-im_max, im_max]` minus a
/// `CUT_MARGIN` strip around `[1, inf)`.
pub fn h3_search(re_min: f64, re_max: f64, im_max: f64) -> Result<Vec<SearchRect>> {
    let edge = 1.0 - CUT_MARGIN;
    let mut rects = vec![SearchRect::new(re_min, edge.min(re_max), -im_max, im_max)?];
    if re_max > edge {
        rects.push(SearchRect::new(edge, re_max, CUT_MARGIN, im_max)?);
        rects.push(SearchRect::new(edge, re_max, -im_max, -CUT_MARGIN)?);
    }
    Ok(rects)
}

/// Eigenvalues off `[1, inf)` from zeros of `det(I + K(lambda))` on grids of
/// `opts.coarse_n`, `opts.n` and `2 opts.n` nodes. For subordinated
/// potentials the expected result is empty.
pub fn eigenvalue_hunt_h3(p: &HyperbolicRadialPotential, search: &[SearchRect], opts: &BsOptions) -> Result<SpectralReport> {
    let mut report = SpectralReport::default();
    for r in search {
        if r.distance_to_ray(1.0) < CUT_MARGIN {
            return Err(crate::Error::Usage(format!("search rectangle {r:?} is closer than {CUT_MARGIN} to [1, inf)")));
        }
    }
    if p.is_zero() {
        return Ok(report);
    }
    let coarse = p.grid(opts.coarse_n.min(opts.n))?;
    let fine = p.grid(opts.n)?;
    let finer = p.grid(2 * opts.n)?;
    let assemble = |g: &QuadratureGrid, z: c64| assemble_k_h3(p, g, z);
    let (accepted, rejected) =
        crate::schrodinger1d::hunt_with(&assemble, [&coarse, &fine, &finer], search, opts, 1.0)?;
    report.eigenvalues = accepted;
    report.rejected = rejected;
    report.sort();
    Ok(report)
}

/// `det(h^2 T(k))` for `-u'' + (V + k^2) u` on `n` intervals of `[0, R]`
/// with `u(0) = 0` and `u'(R) = -k u(R)`; `v[j]` is `V(j h)`, `j = 1..=n`.
fn det_t(h: f64, v: &[c64], k: c64) -> c64 {
    let n = v.len();
    let h2 = h * h;
    let kk = k * k;
    let diag = |j: usize| -> c64 {
        let mut d = c(2.0, 0.0) + (v[j] + kk) * h2;
        if j == n - 1 {
            d += k * (2.0 * h);
        }
        d
    };
    let mut det = C1;
    let mut pivot = diag(0);
    for j in 1..n {
        det *= pivot;
        if pivot == C0 {
            return C0;
        }
        let off = if j == n - 1 { 2.0 } else { 1.0 };
        pivot = diag(j) - c(off, 0.0) / pivot;
    }
    det * pivot
}

/// `det T(k)` over the free determinant, which has no zeros for `Re k > 0`.
fn det_ratio(h: f64, v: &[c64], k: c64) -> c64 {
    det_t(h, v, k) / det_t(h, &vec![C0; v.len()], k)
}

/// Eigenvalues of `-u'' + u + V u` on the half-line from second-order finite
/// differences on the support with the exact exterior condition, refined at
/// two resolutions and Richardson-extrapolated.
pub fn fd_oracle_h3(p: &HyperbolicRadialPotential, opts: &FdOptions) -> Result<SpectralReport> {
    let mut report = SpectralReport::default();
    if p.is_zero() {
        return Ok(report);
    }
    let d = p.support();
    let big_r = d.hi;
    let sample = |n: usize| -> (f64, Vec<c64>) {
        let h = big_r / n as f64;
        (h, (1..=n).map(|j| p.value(j as f64 * h)).collect())
    };
    let sup = (0..=2000).map(|j| p.abs_value(big_r * j as f64 / 2000.0)).fold(0.0, f64::max);
    let s = (2.0 * sup + 1.0).sqrt();
    let rect = SearchRect::new(1e-3 * s, s, -s, s)?;
    let (hc, vc) = sample(opts.coarse);
    let det_c = |k: c64| -> Result<c64> { Ok(det_ratio(hc, &vc, k)) };
    let hunt = HuntOptions { nx: 61, ny: 121, tol: 1e-11, ..HuntOptions::default() };
    let seeds: Vec<c64> = hunt_roots(&det_c, &rect, &hunt)?.into_iter().map(|r| r.lambda).collect();

    let (h1, v1) = sample(opts.n_fd);
    let (h2, v2) = sample(2 * opts.n_fd);
    for k0 in seeds {
        let step = 1e-4 * k0.norm().max(1e-2);
        let solve = |h: f64, v: &[c64], k: c64| -> Option<c64> {
            let f = |k: c64| -> Result<c64> { Ok(det_ratio(h, v, k)) };
            let c = secant(&f, k, step, &[], 1e-11, 80).ok()?;
            c.converged.then_some(c.lambda)
        };
        let Some(k1) = solve(h1, &v1, k0) else { continue };
        let Some(k2) = solve(h2, &v2, k1) else { continue };
        let (l1, l2) = (C1 - k1 * k1, C1 - k2 * k2);
        let lambda = (l2 * 4.0 - l1) / 3.0;
        let est = EigenEstimate {
            lambda,
            residual: (l2 - l1).norm(),
            method: Method::FdOracle,
            grid_n: 2 * opts.n_fd,
            refined: Some(l2),
            k_norm: None,
        };
        if report.eigenvalues.iter().chain(&report.rejected).any(|e| (e.lambda - lambda).norm() <= 1e-8 * lambda.norm().max(1.0)) {
            continue;
        }
        // Decaying solutions need Re k > 0, i.e. lambda off the cut.
        let off_cut = k2.re > 0.0 && distance_to_half_line(lambda, 1.0) >= CUT_MARGIN;
        if est.residual <= opts.stability_tol && off_cut {
            report.eigenvalues.push(est);
        } else {
            report.rejected.push(est);
        }
    }
    report.sort();
    Ok(report)
}

/// `||K(lambda)||` at each accepted eigenvalue.
pub fn k_norms_at(p: &HyperbolicRadialPotential, grid: &QuadratureGrid, lambdas: &[c64]) -> Result<Vec<f64>> {
    lambdas.iter().map(|&l| Ok(crate::numerics::operator_norm(&assemble_k_h3(p, grid, l)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic3d::kappa;

    #[test]
    fn search_avoids_the_cut() {
        for r in h3_search(-2.0, 3.0, 2.0).unwrap() {
            assert!(r.distance_to_ray(1.0) >= CUT_MARGIN * (1.0 - 1e-12));
        }
        assert_eq!(kappa(c(0.0, 0.0)), C1);
    }
}
