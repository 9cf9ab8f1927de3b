use core::fmt;

/// Which membership test a candidate rotation matrix failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationInvariant {
    Finite,
    Orthogonality,
    Determinant,
}

impl fmt::Display for RotationInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationInvariant::Finite => "finite entries",
            RotationInvariant::Orthogonality => "orthogonality (|RᵀR - Id|_F <= 1e-13)",
            RotationInvariant::Determinant => "determinant (|det R - 1| <= 1e-12)",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Error {
    /// A component was NaN or infinite.
    NonFinite,
    /// `vee` was given a matrix whose symmetric part is too large.
    NotSkew {
        asymmetry: f64,
    },
    NotARotation {
        invariant: RotationInvariant,
        residual: f64,
    },
    /// A rotation vector outside the closed ball of radius π.
    OutsideChart {
        norm: f64,
    },
    NotUnitAxis {
        norm: f64,
    },
    AngleOutOfRange {
        angle: f64,
    },
    /// A precomputed rotation does not match `exp` of the rotation vector it was paired with.
    InconsistentRotation {
        deviation: f64,
    },
    LengthMismatch {
        sources: usize,
        targets: usize,
    },
    TooFewPoints {
        count: usize,
    },
    DegenerateGeometry,
    NegativeNoise {
        sigma: f64,
    },
    SingularNormalEquations,
    InvalidStep {
        step: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite => write!(f, "non-finite value"),
            Error::NotSkew { asymmetry } => {
                write!(f, "matrix is not skew-symmetric (|M + Mᵀ|_F = {asymmetry:e})")
            }
            Error::NotARotation { invariant, residual } => {
                write!(f, "not a rotation: violates {invariant} (residual {residual:e})")
            }
            Error::OutsideChart { norm } => write!(f, "rotation vector norm {norm} exceeds π"),
            Error::NotUnitAxis { norm } => write!(f, "axis norm {norm} is not 1"),
            Error::AngleOutOfRange { angle } => write!(f, "angle {angle} outside [0, π]"),
            Error::InconsistentRotation { deviation } => {
                write!(f, "rotation does not match exp(v) (|R - exp(v)|_F = {deviation:e})")
            }
            Error::LengthMismatch { sources, targets } => {
                write!(f, "{sources} sources but {targets} targets")
            }
            Error::TooFewPoints { count } => write!(f, "need at least 3 correspondences, got {count}"),
            Error::DegenerateGeometry => write!(f, "degenerate geometry: source points are collinear"),
            Error::NegativeNoise { sigma } => write!(f, "noise sigma {sigma} is negative"),
            Error::SingularNormalEquations => write!(f, "damped normal equations are singular"),
            Error::InvalidStep { step } => write!(f, "finite-difference step {step} must be positive"),
        }
    }
}

impl core::error::Error for Error {}
