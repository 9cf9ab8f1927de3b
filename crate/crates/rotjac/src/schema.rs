//! JSON file formats.

use rotjac_core::solver::{CorrespondenceSet, SolveReport};
use rotjac_core::{Error, RotationVector, Vector3};
use serde::{Deserialize, Serialize};

/// On-disk form of a [`CorrespondenceSet`]:
/// `{"sources": [[x,y,z],...], "targets": [[x,y,z],...], "noise_sigma": s}`
/// with `noise_sigma` optional (default 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceFile {
    pub sources: Vec<Vector3>,
    pub targets: Vec<Vector3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
}

impl CorrespondenceFile {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Runs the [`CorrespondenceSet`] validation.
    pub fn into_set(self) -> Result<CorrespondenceSet, Error> {
        CorrespondenceSet::try_new(self.sources, self.targets, self.noise_sigma.unwrap_or(0.0))
    }
}

impl From<&CorrespondenceSet> for CorrespondenceFile {
    fn from(c: &CorrespondenceSet) -> Self {
        Self { sources: c.sources().to_vec(), targets: c.targets().to_vec(), noise_sigma: Some(c.noise_sigma()) }
    }
}

/// `fit` output: the solver report plus, for synthetic problems, the ground
/// truth and the rotation angle between estimate and truth.
#[derive(Clone, Debug, Serialize)]
pub struct FitOutput {
    #[serde(flatten)]
    pub report: SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_true: Option<RotationVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle_error: Option<f64>,
}

impl FitOutput {
    pub fn new(report: SolveReport, v_true: Option<RotationVector>) -> Self {
        let angle_error = v_true.map(|t| report.v_hat.exp().angle_to(&t.exp()));
        Self { report, v_true, angle_error }
    }
}
