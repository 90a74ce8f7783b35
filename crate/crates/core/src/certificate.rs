//! Evaluated sufficient conditions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    DaviesDisk,
    HilbertSchmidt,
    FrankL32,
    Rollnik,
    KatoL,
    FkvSubordination,
    HyperbolicSubordination,
    HardyPointwise,
    UniformKNorm,
    DiracStrip,
    KatoSufficiency,
}

/// One inequality `computed < threshold`, or `computed <= threshold` for
/// containment checks, together with the inputs it was evaluated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosureCertificate {
    pub kind: CertificateKind,
    pub computed: f64,
    pub threshold: f64,
    pub verdict: bool,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, f64>,
}

impl EnclosureCertificate {
    /// Strict inequality `computed < threshold`.
    pub fn strict(kind: CertificateKind, computed: f64, threshold: f64) -> Self {
        Self { kind, computed, threshold, verdict: computed < threshold, margin: threshold - computed, inputs: BTreeMap::new() }
    }

    /// Non-strict inequality `computed <= threshold`.
    pub fn containment(kind: CertificateKind, computed: f64, threshold: f64) -> Self {
        Self { verdict: computed <= threshold, ..Self::strict(kind, computed, threshold) }
    }

    pub fn with_input(mut self, name: &str, value: f64) -> Self {
        self.inputs.insert(name.to_string(), value);
        self
    }
}
