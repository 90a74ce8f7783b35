use std::f64::consts::PI;

use faer::c64;
use serde::{Deserialize, Serialize};

use super::potential::HyperbolicRadialPotential;
use crate::certificate::{CertificateKind, EnclosureCertificate};
use crate::error::{Error, Result};
use crate::numerics::complex::dirichlet_half_line_kernel;
use crate::numerics::linalg::{hermitian_eig, CMatrix};
use crate::numerics::nystrom::{assemble, NystromRule};
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{c, principal_sqrt_minus};

/// The subordination constant is read off at `z = 1 - EPSILON^2`.
pub const EPSILON: f64 = 1e-4;

/// Density of the pointwise Hardy check.
const HARDY_SAMPLES: usize = 10_000;

fn check_off_cut(z: c64) -> Result<()> {
    if z.im == 0.0 && z.re > 1.0 {
        return Err(Error::OnCut { re: z.re, im: z.im });
    }
    Ok(())
}

/// `sqrt(-(z - 1))` on the principal branch.
pub fn kappa(z: c64) -> c64 {
    principal_sqrt_minus(z - 1.0)
}

/// Free resolvent kernel `exp(-sqrt(1 - z) rho) / (4 pi sinh rho)` of the
/// Laplace-Beltrami operator on `H^3` at geodesic distance `rho`.
pub fn green_h3(z: c64, rho: f64) -> Result<c64> {
    check_off_cut(z)?;
    if !(rho > 0.0) {
        return Err(Error::Usage(format!("geodesic distance must be positive, got {rho}")));
    }
    Ok((-kappa(z) * rho).exp() / (4.0 * PI * rho.sinh()))
}

/// Radial-sector Nyström matrix of `|V|^{1/2} (H0 - z)^{-1} sgn(V) |V|^{1/2}`.
/// With `u = sinh(rho) psi` the free operator is `-d^2/drho^2 + 1` with a
/// Dirichlet condition at the origin.
pub fn assemble_k_h3(p: &HyperbolicRadialPotential, grid: &QuadratureGrid, z: c64) -> Result<CMatrix> {
    check_off_cut(z)?;
    p.check_truncation(&grid.domain)?;
    let k = kappa(z);
    let a: Vec<f64> = grid.nodes.iter().map(|&r| p.sqrt_abs(r)).collect();
    let b: Vec<c64> = grid.nodes.iter().map(|&r| p.sgn_sqrt(r)).collect();
    assemble(grid, &a, &b, |r, rp| dirichlet_half_line_kernel(k, r, rp), NystromRule::Corrected)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subordination {
    /// Largest eigenvalue of `(H0 - 1)^{-1/2} |V| (H0 - 1)^{-1/2}` against 1.
    pub certificate: EnclosureCertificate,
    /// `sup 4 rho^2 |V(rho)|` against 1.
    pub hardy: EnclosureCertificate,
}

impl Subordination {
    pub fn constant(&self) -> f64 {
        self.certificate.computed
    }
}

/// Smallest `c` in `int |V| |psi|^2 <= c (int |grad psi|^2 - int |psi|^2)`
/// together with the pointwise sufficient condition `|V| <= (c / 4) rho^{-2}`.
pub fn subordination_certificate(p: &HyperbolicRadialPotential, grid: &QuadratureGrid) -> Result<Subordination> {
    p.check_truncation(&grid.domain)?;
    let c_spec = if p.is_zero() {
        0.0
    } else {
        let a: Vec<f64> = grid.nodes.iter().map(|&r| p.sqrt_abs(r)).collect();
        let b: Vec<c64> = a.iter().map(|&x| c(x, 0.0)).collect();
        let k = c(EPSILON, 0.0);
        let m = assemble(grid, &a, &b, |r, rp| dirichlet_half_line_kernel(k, r, rp), NystromRule::Corrected)?;
        hermitian_eig(&m.hermitian_part())?.values.iter().copied().fold(0.0, f64::max)
    };
    let d = p.support();
    let mut hardy = 0.0f64;
    for j in 0..=HARDY_SAMPLES {
        let rho = d.lo + d.length() * j as f64 / HARDY_SAMPLES as f64;
        let v = 4.0 * rho * rho * p.abs_value(rho);
        hardy = hardy.max(if v.is_nan() { f64::INFINITY } else { v });
    }
    for rho in p.breakpoints() {
        hardy = hardy.max(4.0 * rho * rho * p.abs_value(rho));
    }
    Ok(Subordination {
        certificate: EnclosureCertificate::strict(CertificateKind::HyperbolicSubordination, c_spec, 1.0)
            .with_input("epsilon", EPSILON)
            .with_input("nodes", grid.len() as f64),
        hardy: EnclosureCertificate::strict(CertificateKind::HardyPointwise, hardy, 1.0),
    })
}

/// `p` with its spectral subordination constant recorded.
pub fn certify(p: &HyperbolicRadialPotential, grid: &QuadratureGrid) -> Result<HyperbolicRadialPotential> {
    let s = subordination_certificate(p, grid)?;
    Ok(HyperbolicRadialPotential { subordination: Some(s.constant()), ..p.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_closed_form() {
        let g = green_h3(c(0.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(g.re, (-1f64).exp() / (4.0 * PI * 1f64.sinh()), max_relative = 1e-15);
        assert!(green_h3(c(2.0, 0.0), 1.0).is_err());
        assert!(green_h3(c(1.0, 0.0), 1.0).is_ok());
    }

    #[test]
    fn zero_potential() {
        let p = HyperbolicRadialPotential::zero();
        let g = p.default_grid().unwrap();
        assert_eq!(assemble_k_h3(&p, &g, c(0.0, 1.0)).unwrap().max_abs(), 0.0);
        let s = subordination_certificate(&p, &g).unwrap();
        assert_eq!(s.constant(), 0.0);
        assert!(s.certificate.verdict && s.hardy.verdict);
    }
}
