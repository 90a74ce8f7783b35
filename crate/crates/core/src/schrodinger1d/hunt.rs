use faer::c64;
use serde::{Deserialize, Serialize};

use super::kernel::{assemble_k, davies_containment, davies_radius};
use super::potential::PotentialSpec;
use crate::error::{Error, Result};
use crate::numerics::linalg::{nearest_eigenpair, norm_lower_bound, CMatrix};
use crate::numerics::nystrom::NystromRule;
use crate::numerics::quadrature::{Domain, QuadratureGrid};
use crate::numerics::C1;
use crate::spectral::{fredholm_det, hunt_roots, secant, EigenEstimate, HuntOptions, Method, SearchRect, SpectralReport};

/// Required distance of a search rectangle from the cut.
pub const CUT_MARGIN: f64 = 1e-3;

/// Settings of the Birman-Schwinger eigenvalue hunt.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsOptions {
    /// Nodes of the reporting grid; cross-validation uses twice as many.
    pub n: usize,
    /// Nodes of the grid used for the lattice scan.
    pub coarse_n: usize,
    pub hunt: HuntOptions,
    pub rule: NystromRule,
    /// Allowed drift between `n` and `2n`.
    pub cross_tol: f64,
    /// Allowed `|mu + 1|` at the reported eigenvalue.
    pub root_tol: f64,
}

impl Default for BsOptions {
    fn default() -> Self {
        Self {
            n: 800,
            coarse_n: 100,
            hunt: HuntOptions::default(),
            rule: NystromRule::Corrected,
            cross_tol: 1e-4,
            root_tol: 1e-6,
        }
    }
}

/// Three rectangles covering `|lambda| <= radius` minus a `margin`-strip
/// around `[0, inf)`.
pub fn disk_search(radius: f64, margin: f64) -> Result<Vec<SearchRect>> {
    let r = radius.max(2.0 * margin);
    Ok(vec![
        SearchRect::new(-r, -margin, -r, r)?,
        SearchRect::new(-margin, r, margin, r)?,
        SearchRect::new(-margin, r, -r, -margin)?,
    ])
}

/// Search rectangles covering the Davies disk of `p`, inflated by 5%.
pub fn davies_search(p: &PotentialSpec) -> Result<Vec<SearchRect>> {
    disk_search(1.05 * davies_radius(p), CUT_MARGIN)
}

fn det_with<'a, A>(assemble: &'a A, g: &'a QuadratureGrid) -> impl Fn(c64) -> Result<c64> + Sync + 'a
where
    A: Fn(&QuadratureGrid, c64) -> Result<CMatrix> + Sync,
{
    move |z| Ok(fredholm_det(&assemble(g, z)?))
}

/// Accepted and rejected roots of `det(I + K(lambda))` over `search`, for a
/// kernel assembled by `assemble` on a grid. Shared with other radial models;
/// `edge` is the bottom of the essential spectrum.
pub(crate) fn hunt_with<A>(
    assemble: &A,
    grids: [&QuadratureGrid; 3],
    search: &[SearchRect],
    opts: &BsOptions,
    edge: f64,
) -> Result<(Vec<EigenEstimate>, Vec<EigenEstimate>)>
where
    A: Fn(&QuadratureGrid, c64) -> Result<CMatrix> + Sync,
{
    for r in search {
        if r.distance_to_ray(edge) < CUT_MARGIN {
            return Err(Error::Usage(format!("search rectangle {r:?} is closer than {CUT_MARGIN} to [{edge}, inf)")));
        }
    }
    let [coarse, fine, finer] = grids;

    // Seeds only need to land in the basin of the fine-grid root.
    let coarse_hunt = HuntOptions { tol: opts.hunt.tol.max(1e-9), ..opts.hunt };
    let mut seeds = vec![];
    for r in search {
        seeds.extend(hunt_roots(&det_with(assemble, coarse), r, &coarse_hunt)?.into_iter().map(|c| c.lambda));
    }

    let mut accepted: Vec<EigenEstimate> = vec![];
    let mut rejected = vec![];
    for z0 in seeds {
        let step = 1e-4 * z0.norm().max(1.0);
        let polish = |g: &QuadratureGrid, z: c64| -> Option<c64> {
            let c = secant(&det_with(assemble, g), z, step, &[], opts.hunt.tol, opts.hunt.max_iter).ok()?;
            c.converged.then_some(c.lambda)
        };
        let mut est = EigenEstimate {
            lambda: z0,
            residual: f64::INFINITY,
            method: Method::BsRoot,
            grid_n: fine.len(),
            refined: None,
            k_norm: None,
        };
        let Some(l1) = polish(fine, z0) else {
            rejected.push(est);
            continue;
        };
        est.lambda = l1;
        est.refined = polish(finer, l1);
        let inside = search.iter().any(|r| r.contains(l1, 0.0));
        let Ok(k) = assemble(fine, l1) else {
            rejected.push(est);
            continue;
        };
        if let Ok((mu, _, _)) = nearest_eigenpair(&k, -C1, 50) {
            est.residual = (mu + C1).norm();
        }
        est.k_norm = Some(norm_lower_bound(&k, 60));
        let agrees = est.refined.is_some_and(|r| (r - l1).norm() <= opts.cross_tol);
        let duplicate = accepted.iter().any(|e| (e.lambda - l1).norm() <= opts.hunt.dedup * l1.norm().max(1.0));
        if duplicate {
            continue;
        }
        if inside && agrees && est.residual <= opts.root_tol {
            accepted.push(est);
        } else {
            rejected.push(est);
        }
    }
    Ok((accepted, rejected))
}

/// Eigenvalues in the rectangles from zeros of `det(I + K(lambda))`.
///
/// The lattice scan runs on a coarse grid, each zero is polished by secant
/// iteration at `n` and `2n` nodes, and only zeros that agree between the two
/// resolutions and carry an eigenvalue of `K` within `root_tol` of `-1` are
/// accepted. Everything else lands in `rejected`.
pub fn find_eigenvalues_bs(
    p: &PotentialSpec,
    domain: Domain,
    search: &[SearchRect],
    opts: &BsOptions,
) -> Result<SpectralReport> {
    for r in search {
        if r.distance_to_ray(0.0) < CUT_MARGIN {
            return Err(Error::Usage(format!("search rectangle {r:?} is closer than {CUT_MARGIN} to [0, inf)")));
        }
    }
    p.check_truncation(&domain)?;
    let mut report = SpectralReport::default();
    if p.is_zero() {
        report.certificates.push(davies_containment(p, &[]));
        return Ok(report);
    }
    let coarse = p.grid(domain, opts.coarse_n.min(opts.n))?;
    let fine = p.grid(domain, opts.n)?;
    let finer = p.grid(domain, 2 * opts.n)?;
    let (accepted, rejected) =
        hunt_with(&|g: &QuadratureGrid, z| assemble_k(p, g, z, opts.rule), [&coarse, &fine, &finer], search, opts, 0.0)?;
    report.eigenvalues = accepted;
    report.rejected = rejected;
    report.sort();
    report.certificates.push(davies_containment(p, &report.lambdas()));
    Ok(report)
}
