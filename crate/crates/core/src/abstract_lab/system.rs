use faer::c64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::{eigenvalues_unchecked, hermitian_eig, inverse, operator_norm, CMatrix, HermitianEigen};
use crate::numerics::random::random_matrix;
use crate::numerics::{c, C1};

/// Spectral parameters closer than this (relative to `max(||H0||, 1)`) to
/// `sigma(H0)` are rejected by the resolvent.
pub const RESOLVENT_GAP: f64 = 1e-10;
/// `-1` counts as an eigenvalue of `K(lambda0)` within this distance.
pub const ASSUMPTION_TOL: f64 = 1e-8;

/// The triple `(H0, A, B)` with perturbation `V = B* A`.
///
/// `H0` is Hermitian `n x n`, `A` and `B` are `m x n`. Derived quantities
/// (spectral decomposition of `H0`, `G0 = |H0| + 1`, `V`, `H0 + V`) are
/// computed once at construction.
#[derive(Clone, Debug)]
pub struct FactorizedSystem {
    h0: CMatrix,
    a: CMatrix,
    b: CMatrix,
    seed: Option<u64>,
    eig: HermitianEigen,
    v: CMatrix,
    hv: CMatrix,
    hv_spectrum: Vec<c64>,
    h0_norm: f64,
    v_norm: f64,
}

impl FactorizedSystem {
    pub fn new(h0: CMatrix, a: CMatrix, b: CMatrix) -> Result<Self> {
        let n = h0.nrows();
        if !h0.is_square() || n == 0 {
            return Err(Error::Usage("H0 must be a non-empty square matrix".into()));
        }
        if a.ncols() != n || b.ncols() != n || a.nrows() != b.nrows() {
            return Err(Error::Usage(format!(
                "A is {}x{}, B is {}x{}, both must be m x {n}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let eig = hermitian_eig(&h0)?;
        let v = &b.adjoint() * &a;
        let hv = &h0 + &v;
        let hv_spectrum = eigenvalues_unchecked(&hv)?;
        let h0_norm = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let v_norm = operator_norm(&v);
        Ok(Self { h0, a, b, seed: None, eig, v, hv, hv_spectrum, h0_norm, v_norm })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Random system: `H0` diagonal with entries uniform in `[-spread, spread]`,
    /// `A`, `B` complex Gaussian times `scale`.
    pub fn random(n: usize, m: usize, spread: f64, scale: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..=spread)).collect();
        let a = random_matrix(m, n, scale, &mut rng);
        let b = random_matrix(m, n, scale, &mut rng);
        Ok(Self::new(CMatrix::from_real_diag(&d), a, b)?.with_seed(seed))
    }

    pub fn h0(&self) -> &CMatrix {
        &self.h0
    }
    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    pub fn b(&self) -> &CMatrix {
        &self.b
    }
    pub fn v(&self) -> &CMatrix {
        &self.v
    }
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
    pub fn n(&self) -> usize {
        self.h0.nrows()
    }
    pub fn m(&self) -> usize {
        self.a.nrows()
    }
    pub fn h0_norm(&self) -> f64 {
        self.h0_norm
    }
    pub fn v_norm(&self) -> f64 {
        self.v_norm
    }
    /// Ascending eigenvalues of `H0`.
    pub fn free_spectrum(&self) -> &[f64] {
        &self.eig.values
    }
    /// `H0 + B* A` by direct summation.
    pub fn direct_sum(&self) -> &CMatrix {
        &self.hv
    }
    /// Eigenvalues of `H0 + B* A`.
    pub fn perturbed_spectrum(&self) -> &[c64] {
        &self.hv_spectrum
    }

    pub fn dist_to_free_spectrum(&self, lambda: c64) -> f64 {
        self.eig.values.iter().map(|&x| (lambda - x).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn dist_to_perturbed_spectrum(&self, lambda: c64) -> f64 {
        self.hv_spectrum.iter().map(|x| (lambda - x).norm()).fold(f64::INFINITY, f64::min)
    }

    fn gap_scale(&self) -> f64 {
        RESOLVENT_GAP * self.h0_norm.max(1.0)
    }

    fn check_resolvent(&self, lambda: c64) -> Result<()> {
        if self.dist_to_free_spectrum(lambda) < self.gap_scale() {
            return Err(Error::SingularResolvent { re: lambda.re, im: lambda.im });
        }
        Ok(())
    }

    /// `f(H0)` by spectral calculus.
    pub fn h0_function(&self, f: impl Fn(f64) -> c64) -> CMatrix {
        self.eig.map(f)
    }

    /// `G_delta^p` with `G_delta = |H0| + 1 + delta`.
    fn g_power(&self, delta: f64, p: f64) -> CMatrix {
        self.h0_function(|x| c(x.abs() + 1.0 + delta, 0.0).powf(p))
    }

    /// `(H0 - z)^{-1}`.
    pub fn free_resolvent(&self, z: c64) -> Result<CMatrix> {
        self.check_resolvent(z)?;
        Ok(self.h0_function(|x| C1 / (x - z)))
    }

    /// `(H_V - z)^{-1}`.
    pub fn perturbed_resolvent(&self, z: c64) -> Result<CMatrix> {
        if self.dist_to_perturbed_spectrum(z) < self.gap_scale() {
            return Err(Error::SingularResolvent { re: z.re, im: z.im });
        }
        inverse(&self.hv.shift(-z))
    }

    /// Birman-Schwinger operator `K(lambda)`.
    pub fn bs_operator(&self, lambda: c64) -> Result<CMatrix> {
        self.bs_operator_shifted(lambda, 0.0)
    }

    /// `K(lambda)` assembled with the weight `G_delta = |H0| + 1 + delta` as
    /// `[A G^{-1/2}] [G (H0 - lambda)^{-1}] [B G^{-1/2}]*`. Independent of
    /// `delta` since all the functions of `H0` involved commute.
    pub fn bs_operator_shifted(&self, lambda: c64, delta: f64) -> Result<CMatrix> {
        self.check_resolvent(lambda)?;
        let g_mhalf = self.g_power(delta, -0.5);
        let left = &self.a * &g_mhalf;
        let right = &self.b * &g_mhalf;
        let middle = self.h0_function(|x| c(x.abs() + 1.0 + delta, 0.0) / (x - lambda));
        Ok(&(&left * &middle) * &right.adjoint())
    }

    /// Adjoint Birman-Schwinger operator
    /// `[B G^{-1/2}] [G (H0 - conj(lambda))^{-1}] [A G^{-1/2}]*`.
    pub fn adjoint_bs(&self, lambda: c64) -> Result<CMatrix> {
        let lc = lambda.conj();
        self.check_resolvent(lc)?;
        let g_mhalf = self.g_power(0.0, -0.5);
        let left = &self.b * &g_mhalf;
        let right = &self.a * &g_mhalf;
        let middle = self.h0_function(|x| c(x.abs() + 1.0, 0.0) / (x - lc));
        Ok(&(&left * &middle) * &right.adjoint())
    }

    /// The reference point `i eta`, `eta = 10 (||H0|| + ||V|| + 1)`, at which
    /// `-1` must not be an eigenvalue of `K`.
    pub fn assumption_point(&self) -> c64 {
        c(0.0, 10.0 * (self.h0_norm + self.v_norm + 1.0))
    }

    /// Distance from `-1` to `sigma(K(lambda0))` at the reference point.
    pub fn assumption_margin(&self) -> Result<f64> {
        let k = self.bs_operator(self.assumption_point())?;
        let mu = eigenvalues_unchecked(&k)?;
        Ok(mu.iter().map(|m| (m + C1).norm()).fold(f64::INFINITY, f64::min))
    }

    /// `H_V` from the sandwich formula
    /// `G^{1/2} (H0 G^{-1} + [B G^{-1/2}]* A G^{-1/2}) G^{1/2}`.
    pub fn pseudo_friedrichs(&self) -> Result<CMatrix> {
        let margin = self.assumption_margin()?;
        if margin <= ASSUMPTION_TOL {
            return Err(Error::AssumptionViolated(format!(
                "-1 is within {margin:e} of the spectrum of K at the reference point"
            )));
        }
        let g_half = self.g_power(0.0, 0.5);
        let g_mhalf = self.g_power(0.0, -0.5);
        let h0_over_g = self.h0_function(|x| c(x / (x.abs() + 1.0), 0.0));
        let form = &(&self.b * &g_mhalf).adjoint() * &(&self.a * &g_mhalf);
        Ok(&(&g_half * &(&h0_over_g + &form)) * &g_half)
    }

    /// `||(H_V - z)^{-1} - (H0 - z)^{-1} + [B (H0 - conj z)^{-1}]* A (H_V - z)^{-1}||`.
    pub fn second_resolvent_residual(&self, z: c64) -> Result<f64> {
        let r0 = self.free_resolvent(z)?;
        let rv = self.perturbed_resolvent(z)?;
        let br = &self.b * &self.free_resolvent(z.conj())?;
        let corr = &(&br.adjoint() * &self.a) * &rv;
        Ok(operator_norm(&(&(&rv - &r0) + &corr)))
    }

    /// Same identity in the form
    /// `(H_V - z)^{-1} - (H0 - z)^{-1} = -(H0 - z)^{-1} B* A (H_V - z)^{-1}`.
    pub fn kato_resolvent_residual(&self, z: c64) -> Result<f64> {
        let r0 = self.free_resolvent(z)?;
        let rv = self.perturbed_resolvent(z)?;
        let corr = &(&(&r0 * &self.b.adjoint()) * &self.a) * &rv;
        Ok(operator_norm(&(&(&rv - &r0) + &corr)))
    }

    /// Scale against which resolvent residuals are judged:
    /// `max(1, ||R0|| ||R_V|| ||A|| ||B||)`.
    pub fn resolvent_scale(&self, z: c64) -> Result<f64> {
        let r0 = operator_norm(&self.free_resolvent(z)?);
        let rv = operator_norm(&self.perturbed_resolvent(z)?);
        Ok((r0 * rv * operator_norm(&self.a) * operator_norm(&self.b)).max(1.0))
    }
}

/// Shape of a random system batch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub dim_max: usize,
    pub spread: f64,
    pub scale: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self { dim_max: 12, spread: 5.0, scale: 0.7 }
    }
}

impl GeneratorConfig {
    /// System number `trial` of the batch seeded by `seed`; sizes are drawn
    /// with `n in [2, dim_max]`, `m in [1, dim_max]`.
    pub fn system(&self, seed: u64, trial: u64) -> Result<FactorizedSystem> {
        if self.dim_max < 2 {
            return Err(Error::Usage(format!("dim_max must be at least 2, got {}", self.dim_max)));
        }
        let sys_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial);
        let mut rng = ChaCha8Rng::seed_from_u64(sys_seed ^ 0x5151);
        let n = rng.gen_range(2..=self.dim_max);
        let m = rng.gen_range(1..=self.dim_max);
        FactorizedSystem::random(n, m, self.spread, self.scale, sys_seed)
    }
}

/// `A = B = 0` on an `n`-dimensional space with `H0 = diag(d)`.
pub fn unperturbed(d: &[f64], m: usize) -> Result<FactorizedSystem> {
    let n = d.len();
    FactorizedSystem::new(CMatrix::from_real_diag(d), CMatrix::zeros(m, n), CMatrix::zeros(m, n))
}

/// `A = I`, `B = s I`.
pub fn scalar_coupling(d: &[f64], s: c64) -> Result<FactorizedSystem> {
    let n = d.len();
    FactorizedSystem::new(CMatrix::from_real_diag(d), CMatrix::identity(n), CMatrix::identity(n).scale(s))
}

