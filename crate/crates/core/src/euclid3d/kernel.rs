use std::f64::consts::PI;

use faer::c64;

use super::potential::RadialPotential;
use crate::certificate::{CertificateKind, EnclosureCertificate};
use crate::error::{Error, Result};
use crate::numerics::complex::dirichlet_half_line_kernel;
use crate::numerics::linalg::{hermitian_eig, operator_norm, CMatrix};
use crate::numerics::nystrom::{assemble, NystromRule};
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{principal_sqrt_minus, C0};

/// Sharp `L^{3/2}` constant `3^{3/2} pi^2 / 4` of the Frank condition in three dimensions.
pub fn frank_threshold() -> f64 {
    3f64.powf(1.5) * PI * PI / 4.0
}

fn check_off_cut(z: c64) -> Result<()> {
    if z.im == 0.0 && z.re > 0.0 {
        return Err(Error::OnCut { re: z.re, im: z.im });
    }
    Ok(())
}

/// s-wave kernel `sinh(k r_<) exp(-k r_>) / k` of `(-d^2/dr^2 - z)^{-1}` with
/// a Dirichlet condition at the origin, `k = sqrt(-z)`. At `z = 0` it is
/// `min(r, r')`.
pub fn green3d(z: c64, r: f64, rp: f64) -> Result<c64> {
    check_off_cut(z)?;
    if !(r > 0.0 && rp > 0.0) {
        return Err(Error::Usage(format!("radii must be positive, got ({r}, {rp})")));
    }
    Ok(dirichlet_half_line_kernel(principal_sqrt_minus(z), r, rp))
}

/// Full-space free resolvent kernel `exp(-k s) / (4 pi s)` at distance `s`.
pub fn green3d_free(z: c64, s: f64) -> Result<c64> {
    check_off_cut(z)?;
    if !(s > 0.0) {
        return Err(Error::Usage(format!("distance must be positive, got {s}")));
    }
    Ok((-principal_sqrt_minus(z) * s).exp() / (4.0 * PI * s))
}

/// Hermitian part of the s-wave Nyström matrix of
/// `L = |V|^{1/2} (-Delta)^{-1} |V|^{1/2}`.
pub fn l_matrix(p: &RadialPotential, grid: &QuadratureGrid) -> Result<CMatrix> {
    p.check_truncation(&grid.domain)?;
    let a: Vec<f64> = grid.nodes.iter().map(|&r| p.sqrt_abs(r)).collect();
    let b: Vec<c64> = a.iter().map(|&x| c64::new(x, 0.0)).collect();
    let m = assemble(grid, &a, &b, |r, rp| dirichlet_half_line_kernel(C0, r, rp), NystromRule::Corrected)?;
    Ok(m.hermitian_part())
}

/// Largest eigenvalue of the positive matrix from [`l_matrix`].
fn top_eigenvalue(p: &RadialPotential, grid: &QuadratureGrid) -> Result<f64> {
    if p.is_zero() {
        return Ok(0.0);
    }
    let m = l_matrix(p, grid)?;
    Ok(hermitian_eig(&m)?.values.iter().copied().fold(0.0, f64::max))
}

/// `||L||` (largest singular value) against 1.
#[allow(non_snake_case)]
pub fn kato_L_norm(p: &RadialPotential, grid: &QuadratureGrid) -> Result<EnclosureCertificate> {
    p.check_truncation(&grid.domain)?;
    let norm = if p.is_zero() { 0.0 } else { operator_norm(&l_matrix(p, grid)?) };
    Ok(EnclosureCertificate::strict(CertificateKind::KatoL, norm, 1.0).with_input("nodes", grid.len() as f64))
}

/// Smallest `c` in `int |V| |psi|^2 <= c int |grad psi|^2`, which is
/// `||T T*||` for `T = |V|^{1/2} (-Delta)^{-1/2}`: the same operator as
/// [`kato_L_norm`].
pub fn fkv_subordination(p: &RadialPotential, grid: &QuadratureGrid) -> Result<EnclosureCertificate> {
    p.check_truncation(&grid.domain)?;
    let c = top_eigenvalue(p, grid)?;
    Ok(EnclosureCertificate::strict(CertificateKind::FkvSubordination, c, 1.0).with_input("nodes", grid.len() as f64))
}

/// `||V||_{3/2}` against [`frank_threshold`].
pub fn frank_condition(p: &RadialPotential) -> EnclosureCertificate {
    EnclosureCertificate::strict(CertificateKind::FrankL32, p.norms.l32, frank_threshold())
}
