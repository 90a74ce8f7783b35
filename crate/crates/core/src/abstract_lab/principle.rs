use faer::c64;
use serde::{Deserialize, Serialize};

use super::system::FactorizedSystem;
use crate::error::{Error, Result};
use crate::numerics::linalg::{general_eig_full, nearest_eigenpair, operator_norm, vec_norm};
use crate::numerics::C1;
use crate::spectral::{hunt_roots, fredholm_det, HuntOptions, SearchRect};

/// Precondition tolerance on supplied eigenvectors.
pub const INPUT_TOL: f64 = 1e-8;
/// Vectors shorter than this relative scale count as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Eigenvalues of `H_V` this close to `sigma(H0)` are treated as embedded.
pub const EMBEDDED_CUTOFF: f64 = 1e-6;
/// Set-matching tolerance of the correspondence check.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// Outcome of mapping an eigenvector through the principle.
///
/// `residual` is `||K g + g|| / ||g||` (forward) or
/// `||H_V psi - lambda psi|| / ||psi||` (backward).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipleCheckReport {
    pub lambda: c64,
    pub direction: Direction,
    pub residual: f64,
    pub psi: Vec<c64>,
    pub g: Vec<c64>,
}

fn rel_residual(lhs: &[c64], rhs: &[c64], norm: f64) -> f64 {
    vec_norm(&lhs.iter().zip(rhs).map(|(a, b)| a - b).collect::<Vec<_>>()) / norm
}

/// From an eigenvector `psi` of `H_V`: `g = A psi` and `K(lambda) g = -g`.
pub fn principle_forward(sys: &FactorizedSystem, lambda: c64, psi: &[c64]) -> Result<PrincipleCheckReport> {
    let hv = sys.direct_sum();
    let np = vec_norm(psi);
    if psi.len() != sys.n() || np == 0.0 {
        return Err(Error::Usage("psi must be a non-zero vector of length n".into()));
    }
    let lam_psi: Vec<c64> = psi.iter().map(|x| x * lambda).collect();
    let eig_res = rel_residual(&hv.apply(psi), &lam_psi, 1.0);
    if eig_res > INPUT_TOL * np * operator_norm(hv).max(1.0) {
        return Err(Error::Usage(format!("psi is not an eigenvector for {lambda} (residual {eig_res:e})")));
    }
    let g = sys.a().apply(psi);
    let ng = vec_norm(&g);
    if ng <= ZERO_TOL * np * operator_norm(sys.a()).max(1.0) {
        return Err(Error::TheoremViolation(format!("A psi vanishes for the eigenvalue {lambda}")));
    }
    let k = sys.bs_operator(lambda)?;
    let kg = k.apply(&g);
    let minus_g: Vec<c64> = g.iter().map(|x| -x).collect();
    let residual = rel_residual(&kg, &minus_g, ng);
    Ok(PrincipleCheckReport { lambda, direction: Direction::Forward, residual, psi: psi.to_vec(), g })
}

/// From `g` with `K(lambda) g = -g`:
/// `psi = G^{1/2} (H0 - lambda)^{-1} [B G^{-1/2}]* g` is an eigenvector of `H_V`.
pub fn principle_backward(sys: &FactorizedSystem, lambda: c64, g: &[c64]) -> Result<PrincipleCheckReport> {
    let ng = vec_norm(g);
    if g.len() != sys.m() || ng == 0.0 {
        return Err(Error::Usage("g must be a non-zero vector of length m".into()));
    }
    let k = sys.bs_operator(lambda)?;
    let minus_g: Vec<c64> = g.iter().map(|x| -x).collect();
    let kres = rel_residual(&k.apply(g), &minus_g, 1.0);
    if kres > INPUT_TOL * ng * operator_norm(&k).max(1.0) {
        return Err(Error::Usage(format!("g is not a -1 eigenvector of K({lambda}) (residual {kres:e})")));
    }
    let g_half = sys.h0_function(|x| c64::new((x.abs() + 1.0).sqrt(), 0.0));
    let g_mhalf = sys.h0_function(|x| c64::new((x.abs() + 1.0).powf(-0.5), 0.0));
    let r0 = sys.free_resolvent(lambda)?;
    let bt = (sys.b() * &g_mhalf).adjoint();
    let psi = (&(&g_half * &r0) * &bt).apply(g);
    let np = vec_norm(&psi);
    if np <= ZERO_TOL * ng {
        return Err(Error::TheoremViolation(format!("psi vanishes for the eigenvalue {lambda}")));
    }
    let lam_psi: Vec<c64> = psi.iter().map(|x| x * lambda).collect();
    let residual = rel_residual(&sys.direct_sum().apply(&psi), &lam_psi, np);
    Ok(PrincipleCheckReport { lambda, direction: Direction::Backward, residual, psi, g: g.to_vec() })
}

/// Eigenvector of `K(lambda)` for its eigenvalue nearest `-1`, with `|mu + 1|`.
pub fn minus_one_eigenvector(sys: &FactorizedSystem, lambda: c64) -> Result<(Vec<c64>, f64)> {
    let k = sys.bs_operator(lambda)?;
    let (mu, g, _) = nearest_eigenpair(&k, -C1, 50)?;
    Ok((g, (mu + C1).norm()))
}

/// Both sides of the correspondence between eigenvalues of `H_V` off
/// `sigma(H0)` and zeros of `det(I + K(lambda))`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    /// Eigenvalues of `H0 + B* A` at distance above the cutoff from `sigma(H0)`.
    pub direct: Vec<c64>,
    /// `|mu + 1|` for the eigenvalue of `K` nearest `-1`, at each direct eigenvalue.
    pub direct_gaps: Vec<f64>,
    /// Zeros of `det(I + K)` located by the scan.
    pub roots: Vec<c64>,
    /// Direct eigenvalues where `-1` is not in `sigma(K)` or no root was found.
    pub unmatched_direct: Vec<c64>,
    /// Roots that are not eigenvalues of `H_V`.
    pub unmatched_roots: Vec<c64>,
}

impl CorrespondenceReport {
    pub fn mismatches(&self) -> usize {
        self.unmatched_direct.len() + self.unmatched_roots.len()
    }
}

/// Checks both directions of the principle on the whole spectrum.
pub fn spectrum_correspondence(sys: &FactorizedSystem) -> Result<CorrespondenceReport> {
    let direct: Vec<c64> = sys
        .perturbed_spectrum()
        .iter()
        .copied()
        .filter(|&l| sys.dist_to_free_spectrum(l) > EMBEDDED_CUTOFF)
        .collect();
    let mut direct_gaps = Vec::with_capacity(direct.len());
    for &l in &direct {
        let mu = crate::numerics::linalg::eigenvalues_unchecked(&sys.bs_operator(l)?)?;
        direct_gaps.push(mu.iter().map(|m| (m + C1).norm()).fold(f64::INFINITY, f64::min));
    }
    let roots = bs_roots(sys)?;
    let mut unmatched_direct = vec![];
    for (l, gap) in direct.iter().zip(&direct_gaps) {
        let found = roots.iter().any(|r| (r - l).norm() <= MATCH_TOL * l.norm().max(1.0));
        if *gap > MATCH_TOL || !found {
            unmatched_direct.push(*l);
        }
    }
    let all = sys.perturbed_spectrum();
    let unmatched_roots = roots
        .iter()
        .copied()
        .filter(|r| !all.iter().any(|l| (r - l).norm() <= MATCH_TOL * l.norm().max(1.0)))
        .collect();
    Ok(CorrespondenceReport { direct, direct_gaps, roots, unmatched_direct, unmatched_roots })
}

/// Zeros of `det(I + K(lambda))` over a rectangle covering the numerical
/// range bound of `H0 + B*A`, padded by 20%.
///
/// The rectangle only uses `||H0||` and `||V||`, never the eigenvalues of
/// `H_V`, so the scan is independent of the direct eigensolve.
pub fn bs_roots(sys: &FactorizedSystem) -> Result<Vec<c64>> {
    if sys.v_norm() == 0.0 {
        return Ok(vec![]);
    }
    let r = sys.h0_norm() + sys.v_norm();
    let vh = sys.v().hermitian_part();
    let vs = (sys.v() - &vh).scale(c64::new(0.0, -1.0));
    // Imaginary parts of eigenvalues lie in the numerical range of Im V.
    let ev = crate::numerics::linalg::hermitian_eig(&vs.hermitian_part())?.values;
    let (im_lo, im_hi) = (ev[0], ev[ev.len() - 1]);
    let pad_x = 0.2 * 2.0 * r;
    let pad_y = (0.2 * (im_hi - im_lo)).max(0.05 * r).max(1e-3);
    let rect = SearchRect::new(-r - pad_x, r + pad_x, im_lo - pad_y, im_hi + pad_y)?;
    // Multiplying by det(H0 - z) removes the poles on sigma(H0) without
    // moving any zero off it.
    let free = sys.free_spectrum().to_vec();
    let f = |z: c64| -> Result<c64> {
        let pole_free = free.iter().fold(C1, |acc, &x| acc * (x - z));
        Ok(fredholm_det(&sys.bs_operator(z)?) * pole_free)
    };
    let n = sys.n();
    let opts = HuntOptions { nx: (12 * n).max(61), ny: 41, ..HuntOptions::default() };
    let roots = hunt_roots(&f, &rect, &opts)?;
    let mut out = vec![];
    for rc in roots {
        if sys.dist_to_free_spectrum(rc.lambda) <= EMBEDDED_CUTOFF {
            continue;
        }
        let (_, gap) = minus_one_eigenvector(sys, rc.lambda)?;
        if gap <= MATCH_TOL {
            out.push(rc.lambda);
        }
    }
    Ok(out)
}

/// Eigenpairs of `H_V` with simple, non-embedded eigenvalues.
pub fn simple_eigenpairs(sys: &FactorizedSystem) -> Result<Vec<(c64, Vec<c64>)>> {
    let ge = general_eig_full(sys.direct_sum())?;
    let sep = 1e-6 * sys.h0_norm().max(1.0);
    let mut out = vec![];
    for (j, &l) in ge.values.iter().enumerate() {
        let simple = ge.values.iter().enumerate().all(|(i, &m)| i == j || (m - l).norm() > sep);
        if simple && sys.dist_to_free_spectrum(l) > EMBEDDED_CUTOFF {
            out.push((l, ge.vectors.column(j)));
        }
    }
    Ok(out)
}

/// Forward, backward and round trip at one eigenpair. Returns the forward
/// and backward reports and `min_phase ||psi' + psi|| / ||psi||` where
/// `psi'` is the round-tripped vector.
pub fn round_trip(
    sys: &FactorizedSystem,
    lambda: c64,
    psi: &[c64],
) -> Result<(PrincipleCheckReport, PrincipleCheckReport, f64)> {
    let fwd = principle_forward(sys, lambda, psi)?;
    let bwd = principle_backward(sys, lambda, &fwd.g)?;
    let np = vec_norm(psi);
    let err = rel_residual(&bwd.psi, &psi.iter().map(|x| -x).collect::<Vec<_>>(), np);
    Ok((fwd, bwd, err))
}
