use serde::{Deserialize, Serialize};

use super::kernel::{fkv_subordination, frank_condition, frank_threshold, kato_L_norm};
use super::potential::RadialPotential;
use super::rollnik::rollnik_norm;
use crate::certificate::EnclosureCertificate;
use crate::error::{Error, Result};
use crate::numerics::quadrature::QuadratureGrid;

/// The four certificates of one potential and the implications they break.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub amplitude: f64,
    pub frank: EnclosureCertificate,
    pub rollnik: EnclosureCertificate,
    pub fkv: EnclosureCertificate,
    pub kato: EnclosureCertificate,
    pub violations: Vec<String>,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// `Err(TheoremViolation)` listing every broken implication.
    pub fn into_result(self) -> Result<Self> {
        if self.holds() {
            Ok(self)
        } else {
            Err(Error::TheoremViolation(self.violations.join("; ")))
        }
    }
}

/// Checks `frank => rollnik => fkv <=> kato` on the verdicts.
pub fn implication_chain(p: &RadialPotential, grid: &QuadratureGrid) -> Result<ChainReport> {
    let frank = frank_condition(p);
    let rollnik = rollnik_norm(p, grid)?;
    let fkv = fkv_subordination(p, grid)?;
    let kato = kato_L_norm(p, grid)?;
    let mut violations = vec![];
    let show = |c: &EnclosureCertificate| format!("{:?} {:.6} vs {:.6}", c.kind, c.computed, c.threshold);
    if frank.verdict && !rollnik.verdict {
        violations.push(format!("frank passes but rollnik fails: {}, {}", show(&frank), show(&rollnik)));
    }
    if rollnik.verdict && !fkv.verdict {
        violations.push(format!("rollnik passes but fkv fails: {}, {}", show(&rollnik), show(&fkv)));
    }
    if fkv.verdict != kato.verdict {
        violations.push(format!("fkv and kato disagree: {}, {}", show(&fkv), show(&kato)));
    }
    Ok(ChainReport { amplitude: p.amplitude(), frank, rollnik, fkv, kato, violations })
}

/// Amplitude at which each certificate stops passing, from the unit-amplitude
/// values and linearity in `|V|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalAmplitudes {
    pub frank: f64,
    pub rollnik: f64,
    pub fkv: f64,
    pub kato: f64,
}

impl CriticalAmplitudes {
    /// `frank <= rollnik <= fkv` and `fkv = kato` within `tol` relative.
    pub fn ordered(&self, tol: f64) -> bool {
        self.frank <= self.rollnik * (1.0 + tol)
            && self.rollnik <= self.fkv * (1.0 + tol)
            && (self.fkv - self.kato).abs() <= tol * self.fkv
    }
}

pub fn critical_amplitudes(p: &RadialPotential, grid: &QuadratureGrid) -> Result<CriticalAmplitudes> {
    let a = p.amplitude();
    if a == 0.0 {
        return Err(Error::Usage("critical amplitudes need a nonzero profile".into()));
    }
    let r = rollnik_norm(p, grid)?;
    let f = fkv_subordination(p, grid)?;
    let k = kato_L_norm(p, grid)?;
    Ok(CriticalAmplitudes {
        frank: a * frank_threshold() / p.norms.l32,
        rollnik: a * r.threshold / r.computed,
        fkv: a * f.threshold / f.computed,
        kato: a * k.threshold / k.computed,
    })
}

/// Chain reports for `gamma * p / amplitude(p)` over `gammas`.
pub fn gamma_sweep(p: &RadialPotential, grid: &QuadratureGrid, gammas: &[f64]) -> Result<Vec<ChainReport>> {
    let a = p.amplitude();
    if a == 0.0 {
        return Err(Error::Usage("gamma sweep needs a nonzero profile".into()));
    }
    gammas.iter().map(|&g| implication_chain(&p.scaled(g / a)?, grid)).collect()
}

/// Subordination constants of `(c0 / 4) r^{-2}` on `[r0, r1]` for shrinking
/// `r0`, extrapolated to `r0 -> 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyExtrapolation {
    pub c0: f64,
    pub r1: f64,
    pub r0: Vec<f64>,
    pub constants: Vec<f64>,
    pub extrapolated: f64,
}

/// The deficit of the truncated constant behaves like `ln(r1 / r0)^{-2}`;
/// the values are interpolated by a polynomial in `t = ln(r1 / r0)^{-2}`
/// and evaluated at `t = 0`.
pub fn hardy_extrapolation(c0: f64, r1: f64, r0: &[f64]) -> Result<HardyExtrapolation> {
    if r0.len() < 2 {
        return Err(Error::Usage("extrapolation needs at least two cutoffs".into()));
    }
    let mut ts = vec![];
    let mut constants = vec![];
    for &a in r0 {
        let p = RadialPotential::inverse_square(c0, a, r1)?;
        constants.push(fkv_subordination(&p, &p.default_grid()?)?.computed);
        ts.push((r1 / a).ln().powi(-2));
    }
    // Neville at t = 0.
    let mut table = constants.clone();
    for k in 1..ts.len() {
        for i in (k..ts.len()).rev() {
            table[i] = (ts[i] * table[i - 1] - ts[i - k] * table[i]) / (ts[i] - ts[i - k]);
        }
    }
    Ok(HardyExtrapolation { c0, r1, r0: r0.to_vec(), constants, extrapolated: table[ts.len() - 1] })
}
