//! Rotations in exponential coordinates: hat/vee, the exponential map in
//! three forms (two closed forms and the truncated power series), and the
//! logarithm.

use core::f64::consts::PI;
use core::ops::Mul;

use crate::error::{Error, RotationInvariant};
use crate::linalg::{Matrix3, Vector3};

/// Below this angle (radians) every `sinθ/θ`-type coefficient is evaluated by
/// its Taylor expansion.
pub const EPS_SMALL: f64 = 1e-4;
/// Width of the band below π where the logarithm may pick the axis sign by
/// the canonical rule instead of the skew part.
pub const EPS_PI: f64 = 1e-6;
/// Slack on `‖v‖ ≤ π` accepted by [`RotationVector`].
pub const CHART_TOL: f64 = 1e-12;
/// Bound on `‖RᵀR − Id‖_F` for a [`Rotation`].
pub const ORTHOGONALITY_TOL: f64 = 1e-13;
/// Bound on `|det R − 1|` for a [`Rotation`].
pub const DETERMINANT_TOL: f64 = 1e-12;
/// Bound on `|‖axis‖ − 1|` for an [`AxisAngle`].
pub const UNIT_TOL: f64 = 1e-12;
/// Bound on `‖M + Mᵀ‖_F` accepted by [`vee`].
pub const SKEW_TOL: f64 = 1e-10;

/// Above this angle the logarithm extracts the axis from the symmetric part of
/// `R`; below it the skew part is better conditioned.
const SYMMETRIC_AXIS_ANGLE: f64 = 2.0 * PI / 3.0;
/// `|sinθ|` below which the skew part no longer fixes the axis sign.
const AXIS_SIGN_NOISE: f64 = 1e-14;
/// Components smaller than this are treated as zero by the canonical sign rule.
const AXIS_ZERO_TOL: f64 = 1e-12;

/// The cross-product matrix `[a]×`, so that `hat(a) · b = a × b`.
pub fn hat(a: &Vector3) -> Matrix3 {
    Matrix3::from_rows([[0.0, -a.z, a.y], [a.z, 0.0, -a.x], [-a.y, a.x, 0.0]])
}

/// Inverse of [`hat`]: extracts `(M₃₂, M₁₃, M₂₁)` from a skew-symmetric matrix.
pub fn vee(m: &Matrix3) -> Result<Vector3, Error> {
    let asymmetry = (*m + m.transpose()).frobenius_norm();
    if !(asymmetry <= SKEW_TOL) {
        return Err(Error::NotSkew { asymmetry });
    }
    Ok(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// Half the skew part of `m`, read off as a vector: `vee((M − Mᵀ)/2)`.
pub(crate) fn skew_vector(m: &Matrix3) -> Vector3 {
    Vector3::new(0.5 * (m[(2, 1)] - m[(1, 2)]), 0.5 * (m[(0, 2)] - m[(2, 0)]), 0.5 * (m[(1, 0)] - m[(0, 1)]))
}

/// `sinθ / θ`.
pub fn sinc(theta: f64) -> f64 {
    if theta.abs() < EPS_SMALL {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        libm::sin(theta) / theta
    }
}

/// `1 − cosθ`, evaluated as `2 sin²(θ/2)`.
pub fn versine(theta: f64) -> f64 {
    let s = libm::sin(0.5 * theta);
    2.0 * s * s
}

/// `(1 − cosθ) / θ²`.
pub fn versine_over_sq(theta: f64) -> f64 {
    if theta.abs() < EPS_SMALL {
        let t2 = theta * theta;
        0.5 - t2 / 24.0 + t2 * t2 / 720.0
    } else {
        versine(theta) / (theta * theta)
    }
}

/// `(1 − cosθ) / θ`.
pub fn versine_over(theta: f64) -> f64 {
    if theta.abs() < EPS_SMALL {
        let t2 = theta * theta;
        theta * (0.5 - t2 / 24.0 + t2 * t2 / 720.0)
    } else {
        versine(theta) / theta
    }
}

/// `θ / sinθ`.
fn inverse_sinc(theta: f64) -> f64 {
    if theta.abs() < EPS_SMALL {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0
    } else {
        theta / libm::sin(theta)
    }
}

/// Exponential coordinates `v = θ·v̄` inside the canonical chart `‖v‖ ≤ π`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct RotationVector(Vector3);

impl RotationVector {
    pub const ZERO: RotationVector = RotationVector(Vector3::ZERO);

    pub fn try_new(v: Vector3) -> Result<Self, Error> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = v.norm();
        if norm > PI + CHART_TOL {
            return Err(Error::OutsideChart { norm });
        }
        Ok(Self(v))
    }

    /// Maps any finite vector to a rotation vector describing the same
    /// rotation, by repeated antipodal wraps `v ← v·(1 − 2π/‖v‖)`.
    pub fn wrap(mut v: Vector3) -> Result<Self, Error> {
        if !v.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut norm = v.norm();
        while norm > PI {
            v = v.scale(1.0 - 2.0 * PI / norm);
            norm = v.norm();
        }
        Ok(Self(v))
    }

    pub fn vector(&self) -> Vector3 {
        self.0
    }

    pub fn angle(&self) -> f64 {
        self.0.norm()
    }

    pub fn to_axis_angle(&self) -> AxisAngle {
        AxisAngle::from(*self)
    }

    pub fn exp(&self) -> Rotation {
        exp_rodrigues(&self.0)
    }
}

impl From<RotationVector> for Vector3 {
    fn from(v: RotationVector) -> Self {
        v.0
    }
}

impl TryFrom<Vector3> for RotationVector {
    type Error = Error;
    fn try_from(v: Vector3) -> Result<Self, Error> {
        Self::try_new(v)
    }
}

/// A proper orthogonal 3×3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Rotation(Matrix3);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation(Matrix3::IDENTITY);

    /// Accepts `m` only if it is finite, orthogonal to [`ORTHOGONALITY_TOL`]
    /// and has determinant within [`DETERMINANT_TOL`] of one.
    pub fn try_from_matrix(m: Matrix3) -> Result<Self, Error> {
        if !m.is_finite() {
            return Err(Error::NotARotation { invariant: RotationInvariant::Finite, residual: f64::NAN });
        }
        let ortho = (m.transpose() * m).distance(&Matrix3::IDENTITY);
        if !(ortho <= ORTHOGONALITY_TOL) {
            return Err(Error::NotARotation { invariant: RotationInvariant::Orthogonality, residual: ortho });
        }
        let det = (m.determinant() - 1.0).abs();
        if !(det <= DETERMINANT_TOL) {
            return Err(Error::NotARotation { invariant: RotationInvariant::Determinant, residual: det });
        }
        Ok(Self(m))
    }

    pub(crate) const fn from_matrix_unchecked(m: Matrix3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3 {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn rotate(&self, u: &Vector3) -> Vector3 {
        self.0.mul_vec(u)
    }

    pub fn log(&self) -> RotationVector {
        log(self)
    }

    /// Angle of `selfᵀ · other`, i.e. the geodesic distance between the two.
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        log(&(self.transpose() * *other)).angle()
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, o: Rotation) -> Rotation {
        Rotation(self.0 * o.0)
    }
}

impl Mul<Vector3> for Rotation {
    type Output = Vector3;
    fn mul(self, u: Vector3) -> Vector3 {
        self.rotate(&u)
    }
}

impl From<Rotation> for Matrix3 {
    fn from(r: Rotation) -> Self {
        r.0
    }
}

/// Unit axis and angle in `[0, π]`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxisAngle {
    axis: Vector3,
    angle: f64,
}

impl AxisAngle {
    pub fn try_new(axis: Vector3, angle: f64) -> Result<Self, Error> {
        if !axis.is_finite() || !angle.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm = axis.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitAxis { norm });
        }
        if !(0.0..=PI).contains(&angle) {
            return Err(Error::AngleOutOfRange { angle });
        }
        Ok(Self { axis, angle })
    }

    pub fn axis(&self) -> Vector3 {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn rotation_vector(&self) -> RotationVector {
        RotationVector(self.axis.scale(self.angle))
    }
}

impl From<RotationVector> for AxisAngle {
    /// The zero vector maps to angle 0 about `e₁`.
    fn from(v: RotationVector) -> Self {
        let angle = v.angle();
        if angle == 0.0 {
            return Self { axis: Vector3::basis(0), angle };
        }
        Self { axis: v.0.scale(1.0 / angle), angle: angle.min(PI) }
    }
}

/// Intermediate quantities of the Rodrigues formula, shared with the
/// Jacobian module so that `Id − R` is formed without cancellation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ExpParts {
    pub theta: f64,
    pub hat_v: Matrix3,
    pub hat_v_sq: Matrix3,
    /// `sinθ/θ`
    pub sinc: f64,
    /// `(1 − cosθ)/θ²`
    pub versine_sq: f64,
}

impl ExpParts {
    pub fn new(v: &Vector3) -> Self {
        let theta = v.norm();
        let hat_v = hat(v);
        Self { theta, hat_v, hat_v_sq: hat_v * hat_v, sinc: sinc(theta), versine_sq: versine_over_sq(theta) }
    }

    /// `R − Id = (sinθ/θ)[v]× + ((1−cosθ)/θ²)[v]×²`.
    pub fn rotation_minus_identity(&self) -> Matrix3 {
        self.hat_v.scale(self.sinc) + self.hat_v_sq.scale(self.versine_sq)
    }

    pub fn rotation(&self) -> Matrix3 {
        Matrix3::IDENTITY + self.rotation_minus_identity()
    }
}

/// Rodrigues formula `Id + sinθ[v̄]× + (1−cosθ)[v̄]×²`, written on `[v]×`
/// directly so the small-angle branch needs no division by θ.
pub fn exp_rodrigues(v: &Vector3) -> Rotation {
    Rotation(ExpParts::new(v).rotation())
}

/// The alternative closed form `cosθ Id + sinθ[v̄]× + (1−cosθ) v̄v̄ᵀ`.
pub fn exp_rodrigues_outer(v: &Vector3) -> Rotation {
    let theta = v.norm();
    if theta == 0.0 {
        return Rotation::IDENTITY;
    }
    let axis = v.scale(1.0 / theta);
    let m = Matrix3::IDENTITY.scale(libm::cos(theta))
        + hat(&axis).scale(libm::sin(theta))
        + axis.outer(&axis).scale(versine(theta));
    Rotation(m)
}

/// Partial sum `Σ_{k=0}^{terms} [v]×ᵏ / k!` of the exponential series.
pub fn exp_series(v: &Vector3, terms: u32) -> Matrix3 {
    let k = hat(v);
    let mut term = Matrix3::IDENTITY;
    let mut sum = Matrix3::IDENTITY;
    for n in 1..=terms {
        term = (term * k).scale(1.0 / f64::from(n));
        sum += term;
    }
    sum
}

/// Logarithm onto the canonical chart `‖v‖ ≤ π`.
///
/// The angle is `atan2(‖w‖, (tr R − 1)/2)` with `w = vee((R − Rᵀ)/2) = sinθ·v̄`,
/// which equals the clamped `arccos((tr R − 1)/2)` but keeps full precision
/// near 0 and π. The identity maps to the zero vector. At θ = π, where `±v̄`
/// describe the same rotation, the first non-zero axis component is made
/// positive.
pub fn log(r: &Rotation) -> RotationVector {
    let m = &r.0;
    let w = skew_vector(m);
    let sin_theta = w.norm();
    let cos_theta = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = libm::atan2(sin_theta, cos_theta);

    if theta < EPS_SMALL {
        return RotationVector(w.scale(inverse_sinc(theta)));
    }
    if theta <= SYMMETRIC_AXIS_ANGLE {
        return RotationVector(w.scale(theta / sin_theta));
    }

    // (R + Rᵀ)/2 − cosθ Id = (1 − cosθ) v̄v̄ᵀ
    let one_minus_cos = 1.0 - cos_theta;
    let sym = |i: usize, j: usize| 0.5 * (m[(i, j)] + m[(j, i)]);
    let diag = [sym(0, 0), sym(1, 1), sym(2, 2)];
    let k = (0..3).fold(0, |best, i| if diag[i] > diag[best] { i } else { best });
    let axis_k = libm::sqrt(((diag[k] - cos_theta) / one_minus_cos).max(0.0));
    let mut axis = Vector3::ZERO;
    for j in 0..3 {
        axis[j] = if j == k { axis_k } else { sym(j, k) / (one_minus_cos * axis_k) };
    }
    axis = axis.scale(1.0 / axis.norm());

    let alignment = w.dot(&axis);
    let flip = if theta > PI - EPS_PI && alignment.abs() <= AXIS_SIGN_NOISE {
        canonical_sign(&axis) < 0.0
    } else {
        alignment < 0.0
    };
    if flip {
        axis = -axis;
    }
    RotationVector(axis.scale(theta))
}

fn canonical_sign(axis: &Vector3) -> f64 {
    axis.to_array().into_iter().find(|c| c.abs() > AXIS_ZERO_TOL).map_or(1.0, f64::signum)
}
