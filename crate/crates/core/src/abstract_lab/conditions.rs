use faer::c64;
use serde::{Deserialize, Serialize};

use super::system::FactorizedSystem;
use crate::error::{Error, Result};
use crate::numerics::linalg::{hermitian_eig, operator_norm, CMatrix};
use crate::numerics::c;

/// One sufficient condition: the best value found and the parameter it was
/// attained at.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub holds: bool,
    pub value: f64,
    pub parameter: f64,
}

/// Relative-bound condition: `max(||A psi||^2, ||B psi||^2) <= a || |H0|^{1/2} psi ||^2 + b ||psi||^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeBound {
    pub holds: bool,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// `min_eta ||K(i eta)||` over the sweep; holds when below 1.
    pub small_k: ConditionVerdict,
    /// `min_delta ||[B D^{-1/2}]* [A D^{-1/2}]||`, `D = |H0| + delta`.
    pub sandwich: ConditionVerdict,
    /// Same quantity through the adjoint pairing `[A D^{-1/2}]* [B D^{-1/2}]`.
    pub bilinear: ConditionVerdict,
    pub relative_bound: RelativeBound,
    /// Sandwich norm at `delta = b / a` from the relative bound.
    pub sandwich_at_ratio: f64,
    /// `eta` with `-1` not in `sigma(K(i eta))`, found from the sandwich
    /// bound, and the distance of `-1` to that spectrum.
    pub certified_eta: f64,
    pub certified_margin: f64,
    /// Relative bound implies the sandwich bound, which implies the
    /// spectral assumption.
    pub chain_consistent: bool,
}

/// `2^k` ladder from `lo` up to `hi`.
fn ladder(lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![];
    let mut x = lo;
    while x <= hi * (1.0 + 1e-12) {
        v.push(x);
        x *= 2.0;
    }
    v
}

fn d_mhalf(sys: &FactorizedSystem, delta: f64) -> CMatrix {
    sys.h0_function(|x| c((x.abs() + delta).powf(-0.5), 0.0))
}

/// `||[B D^{-1/2}]* [A D^{-1/2}]||` with `D = |H0| + delta`.
pub fn sandwich_norm(sys: &FactorizedSystem, delta: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::Usage(format!("delta must be positive, got {delta}")));
    }
    let d = d_mhalf(sys, delta);
    Ok(operator_norm(&(&(sys.b() * &d).adjoint() * &(sys.a() * &d))))
}

fn bilinear_norm(sys: &FactorizedSystem, delta: f64) -> f64 {
    let d = d_mhalf(sys, delta);
    operator_norm(&(&(sys.a() * &d).adjoint() * &(sys.b() * &d)))
}

/// Smallest `b >= 0` making the relative bound hold for the given `a`:
/// the largest eigenvalue of `A*A - a|H0|` and `B*B - a|H0|`.
pub fn minimal_b(sys: &FactorizedSystem, a: f64) -> Result<f64> {
    let abs_h0 = sys.h0_function(|x| c(a * x.abs(), 0.0));
    let mut worst = 0.0f64;
    for f in [sys.a(), sys.b()] {
        let m = (&(&f.adjoint() * f) - &abs_h0).hermitian_part();
        let top = hermitian_eig(&m)?.values.last().copied().unwrap_or(0.0);
        worst = worst.max(top);
    }
    Ok(worst)
}

/// Whether the relative bound holds with `(a, b)`, up to `1e-12` relative.
pub fn relative_bound_holds(sys: &FactorizedSystem, a: f64, b: f64) -> Result<bool> {
    let need = minimal_b(sys, a)?;
    Ok(need <= b + 1e-12 * (1.0 + b.abs() + sys.h0_norm()))
}

/// Evaluates the sufficient conditions for the spectral assumption and the
/// implications between them.
pub fn lemma1_conditions(sys: &FactorizedSystem) -> Result<LemmaReport> {
    let top = 10.0 * (sys.h0_norm() + sys.v_norm() + 1.0);
    let mut small_k = ConditionVerdict { holds: false, value: f64::INFINITY, parameter: 0.0 };
    for eta in ladder(1e-3, top * 1e3) {
        let k = operator_norm(&sys.bs_operator(c(0.0, eta))?);
        if k < small_k.value {
            small_k = ConditionVerdict { holds: k < 1.0, value: k, parameter: eta };
        }
    }
    let deltas = ladder(0.5, 2f64.powi(30));
    let mut sandwich = ConditionVerdict { holds: false, value: f64::INFINITY, parameter: 0.0 };
    let mut bilinear = sandwich;
    for &d in &deltas {
        let s = sandwich_norm(sys, d)?;
        if s < sandwich.value {
            sandwich = ConditionVerdict { holds: s < 1.0, value: s, parameter: d };
        }
        let t = bilinear_norm(sys, d);
        if t < bilinear.value {
            bilinear = ConditionVerdict { holds: t < 1.0, value: t, parameter: d };
        }
    }

    // Smallest a on the grid; b from the matrix inequality, kept positive.
    let mut relative_bound = RelativeBound { holds: false, a: f64::NAN, b: f64::NAN };
    for k in 1..100 {
        let a = k as f64 / 100.0;
        let b = minimal_b(sys, a)?.max(1e-12);
        if b.is_finite() {
            relative_bound = RelativeBound { holds: true, a, b };
            break;
        }
    }
    let RelativeBound { a, b, .. } = relative_bound;
    let sandwich_at_ratio = sandwich_norm(sys, b / a)?;

    // With ||[B D^{-1/2}]*[A D^{-1/2}]|| <= a0 < 1 it suffices that
    // ||(|H0| + delta)(H0 - i eta)^{-1}|| <= 1 / a0.
    let (a0, delta) = if sandwich_at_ratio < 1.0 { (sandwich_at_ratio, b / a) } else { (sandwich.value, sandwich.parameter) };
    let mut certified_eta = f64::NAN;
    let mut certified_margin = f64::NAN;
    if a0 < 1.0 {
        for eta in ladder(1e-3, 1e12) {
            let w = sys
                .free_spectrum()
                .iter()
                .map(|&x| (x.abs() + delta) / c64::new(x, -eta).norm())
                .fold(0.0f64, f64::max);
            if w * a0 < 1.0 {
                certified_eta = eta;
                let k = sys.bs_operator(c(0.0, eta))?;
                let mu = crate::numerics::linalg::eigenvalues_unchecked(&k)?;
                certified_margin = mu.iter().map(|m| (m + 1.0).norm()).fold(f64::INFINITY, f64::min);
                break;
            }
        }
    }
    let chain_consistent = (!relative_bound.holds || sandwich_at_ratio <= a * (1.0 + 1e-9) + 1e-12)
        && (!(sandwich.holds || sandwich_at_ratio < 1.0) || certified_margin > 0.0);
    Ok(LemmaReport {
        small_k,
        sandwich,
        bilinear,
        relative_bound,
        sandwich_at_ratio,
        certified_eta,
        certified_margin,
        chain_consistent,
    })
}

/// `sup_z |Im z| ||A (H0 - z)^{-1}||^2` over the samples.
pub fn kato_smoothness_sup(sys: &FactorizedSystem, z_samples: &[c64]) -> Result<f64> {
    if z_samples.is_empty() {
        return Err(Error::Usage("no z samples".into()));
    }
    let mut sup = 0.0f64;
    for &z in z_samples {
        if z.im == 0.0 {
            return Err(Error::Usage(format!("z sample {z} is real")));
        }
        let n = operator_norm(&(sys.a() * &sys.free_resolvent(z)?));
        sup = sup.max(z.im.abs() * n * n);
    }
    Ok(sup)
}
