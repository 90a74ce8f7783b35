use std::f64::consts::{E, PI};

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::certificate::{CertificateKind, EnclosureCertificate};
use crate::error::{Error, Result};

/// `(C1, C2)` with `C1 = (pi/2)^{1/3} sqrt(1 + e^{-1} + 2 e^{-2})` and
/// `C2 = 2^{17/6} / (3 pi^{2/3})`.
pub fn dirac_constants() -> (f64, f64) {
    let c1 = (PI / 2.0).cbrt() * (1.0 + 1.0 / E + 2.0 / (E * E)).sqrt();
    let c2 = 2f64.powf(17.0 / 6.0) / (3.0 * PI.powf(2.0 / 3.0));
    (c1, c2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExclusionKind {
    /// No eigenvalue in `|Re lambda| < half_width`.
    Strip { half_width: f64 },
    /// No eigenvalues at all.
    AllPlane,
    /// The condition fails already on the imaginary axis.
    Empty,
}

/// `{lambda : C1 ||v||_3 + C2 |Re lambda| ||v||_{3/2} < 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosureRegion {
    pub norm3: f64,
    pub norm32: f64,
    pub c1: f64,
    pub c2: f64,
    pub exclusion: ExclusionKind,
    /// `C1 ||v||_3 < 1`.
    pub certificate: EnclosureCertificate,
}

impl EnclosureRegion {
    /// Half-width of the eigenvalue-free strip; infinite for the whole plane.
    pub fn half_width(&self) -> f64 {
        match self.exclusion {
            ExclusionKind::Strip { half_width } => half_width,
            ExclusionKind::AllPlane => f64::INFINITY,
            ExclusionKind::Empty => 0.0,
        }
    }

    /// Whether `lambda` is certified not to be an eigenvalue.
    pub fn excludes(&self, lambda: c64) -> bool {
        lambda.re.abs() < self.half_width()
    }

    /// Corners of the strip boundary `Re lambda = +-w` for `|Im lambda| <= im_max`.
    pub fn boundary(&self, im_max: f64) -> Vec<(f64, f64)> {
        let w = self.half_width();
        if !w.is_finite() || w == 0.0 {
            return vec![];
        }
        vec![(-w, -im_max), (-w, im_max), (w, -im_max), (w, im_max)]
    }
}

/// The strip where the hypothesis of the Dirac enclosure holds.
pub fn enclosure_region(norm3: f64, norm32: f64) -> Result<EnclosureRegion> {
    if !(norm3 >= 0.0 && norm32 >= 0.0) {
        return Err(Error::Usage(format!("norms must be non-negative, got {norm3}, {norm32}")));
    }
    if !(norm3.is_finite() && norm32.is_finite()) {
        return Err(Error::Usage("potential norms must be finite".into()));
    }
    let (c1, c2) = dirac_constants();
    let lead = c1 * norm3;
    let exclusion = if lead >= 1.0 {
        ExclusionKind::Empty
    } else if norm32 == 0.0 {
        ExclusionKind::AllPlane
    } else {
        ExclusionKind::Strip { half_width: (1.0 - lead) / (c2 * norm32) }
    };
    let certificate = EnclosureCertificate::strict(CertificateKind::DiracStrip, lead, 1.0)
        .with_input("norm3", norm3)
        .with_input("norm32", norm32);
    Ok(EnclosureRegion { norm3, norm32, c1, c2, exclusion, certificate })
}

/// `(2 pi^2)^{1/3}`.
pub fn kato_threshold() -> f64 {
    (2.0 * PI * PI).cbrt()
}

/// `||v1||_3 < (2 pi^2)^{1/3}` for the `L^3` part of a split `v = v1 + v2`
/// with `v2` bounded.
pub fn kato_sufficiency_check(norm3_v1: f64) -> Result<EnclosureCertificate> {
    if !(norm3_v1 >= 0.0) {
        return Err(Error::Usage(format!("norm must be non-negative, got {norm3_v1}")));
    }
    Ok(EnclosureCertificate::strict(CertificateKind::KatoSufficiency, norm3_v1, kato_threshold()))
}
