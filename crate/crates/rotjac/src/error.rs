use std::io;
use std::path::PathBuf;

use rotjac_core::Error as CoreError;
use thiserror::Error;

/// Everything a command can fail with. [`CliError::exit_code`] maps each
/// variant to the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(CoreError),
    #[error("{0}")]
    NotARotation(CoreError),
    #[error("{0}")]
    Degenerate(CoreError),
    #[error("{0}")]
    Singular(CoreError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("cannot write output: {0}")]
    Write(#[from] io::Error),
    #[error("properties failed: {}", .0.join(", "))]
    PropertyFailure(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::PropertyFailure(_) | CliError::Write(_) => 1,
            CliError::Usage(_) | CliError::Input(_) | CliError::Json(_) | CliError::Read { .. } => 2,
            CliError::NotARotation(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::Singular(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NotARotation { .. } => CliError::NotARotation(err),
            CoreError::DegenerateGeometry => CliError::Degenerate(err),
            CoreError::SingularNormalEquations => CliError::Singular(err),
            other => CliError::Input(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rotjac_core::RotationInvariant;

    #[test]
    fn exit_codes() {
        let not_rotation = CoreError::NotARotation { invariant: RotationInvariant::Determinant, residual: 2.0 };
        assert_eq!(CliError::from(not_rotation).exit_code(), 3);
        assert_eq!(CliError::from(CoreError::DegenerateGeometry).exit_code(), 4);
        assert_eq!(CliError::from(CoreError::SingularNormalEquations).exit_code(), 5);
        assert_eq!(CliError::from(CoreError::TooFewPoints { count: 2 }).exit_code(), 2);
        assert_eq!(CliError::PropertyFailure(vec!["tangency".into()]).exit_code(), 1);
    }
}
