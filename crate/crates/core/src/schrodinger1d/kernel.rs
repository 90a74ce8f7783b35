use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::potential::PotentialSpec;
use crate::certificate::{CertificateKind, EnclosureCertificate};
use crate::error::{Error, Result};
use crate::numerics::linalg::CMatrix;
use crate::numerics::nystrom::{assemble, NystromRule};
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::principal_sqrt_minus;

/// Relative slack of the Hilbert-Schmidt and disk checks.
pub const HS_SLACK: f64 = 1e-4;
pub const DISK_SLACK: f64 = 1e-3;

pub(crate) fn check_off_cut(z: c64) -> Result<()> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::OnCut { re: z.re, im: z.im });
    }
    Ok(())
}

/// Free resolvent kernel `exp(-k |x - y|) / (2 k)`, `k = sqrt(-z)`.
pub fn green1d(z: c64, x: f64, y: f64) -> Result<c64> {
    check_off_cut(z)?;
    let k = principal_sqrt_minus(z);
    Ok((-k * (x - y).abs()).exp() / (k * 2.0))
}

/// Weighted Nyström matrix of `|V|^{1/2} (H0 - z)^{-1} sgn V |V|^{1/2}`.
pub fn assemble_k(p: &PotentialSpec, grid: &QuadratureGrid, z: c64, rule: NystromRule) -> Result<CMatrix> {
    check_off_cut(z)?;
    p.check_truncation(&grid.domain)?;
    let k = principal_sqrt_minus(z);
    let inv2k = (k * 2.0).inv();
    let a: Vec<f64> = grid.nodes.iter().map(|&x| p.sqrt_abs(x)).collect();
    let b: Vec<c64> = grid.nodes.iter().map(|&x| p.sgn_sqrt(x)).collect();
    assemble(grid, &a, &b, |x, y| (-k * (x - y).abs()).exp() * inv2k, rule)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HsCheck {
    pub z: c64,
    pub hs: f64,
    pub bound: f64,
    pub ok: bool,
}

/// Frobenius norm of the plain Nyström matrix against `||V||_1 / (2 sqrt|z|)`.
///
/// The squared entries are `w_i |V_i| w_j |V_j| exp(-2 Re k |x_i - x_j|) / (4 |k|^2)`,
/// summed without forming the complex matrix.
pub fn hs_bound_check(p: &PotentialSpec, z: c64, grid: &QuadratureGrid) -> Result<HsCheck> {
    check_off_cut(z)?;
    p.check_truncation(&grid.domain)?;
    let k = principal_sqrt_minus(z);
    let m: Vec<(f64, f64)> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .map(|(&x, &w)| (x, w * p.sqrt_abs(x).powi(2)))
        .filter(|&(_, m)| m > 0.0)
        .collect();
    let decay = 2.0 * k.re;
    let sum: f64 = (0..m.len())
        .into_par_iter()
        .map(|i| {
            let (xi, mi) = m[i];
            let off: f64 = m[i + 1..].iter().map(|&(xj, mj)| mj * (-decay * (xj - xi).abs()).exp()).sum();
            mi * (mi + 2.0 * off)
        })
        .sum();
    let hs = (sum / (4.0 * k.norm_sqr())).sqrt();
    let bound = p.l1_norm() / (2.0 * z.norm().sqrt());
    Ok(HsCheck { z, hs, bound, ok: hs <= bound + HS_SLACK * bound })
}

/// `||V||_1^2 / 4`.
pub fn davies_radius(p: &PotentialSpec) -> f64 {
    0.25 * p.l1_norm().powi(2)
}

/// Disk certificate with nothing contained yet; see [`davies_containment`].
pub fn davies_disk(p: &PotentialSpec) -> EnclosureCertificate {
    EnclosureCertificate::containment(CertificateKind::DaviesDisk, 0.0, davies_radius(p))
        .with_input("l1_norm", p.l1_norm())
}

/// Largest `|lambda|` against the disk radius inflated by [`DISK_SLACK`].
pub fn davies_containment(p: &PotentialSpec, lambdas: &[c64]) -> EnclosureCertificate {
    let r = davies_radius(p);
    let max = lambdas.iter().map(|l| l.norm()).fold(0.0, f64::max);
    EnclosureCertificate::containment(CertificateKind::DaviesDisk, max, r * (1.0 + DISK_SLACK))
        .with_input("l1_norm", p.l1_norm())
        .with_input("radius", r)
        .with_input("eigenvalues", lambdas.len() as f64)
}
