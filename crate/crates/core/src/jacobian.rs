//! Derivatives of `R(v) = exp([v]×)` with respect to the exponential
//! coordinates `v`.
//!
//! Two independent closed forms are provided:
//!
//! * the compact forms, `∂(Ru)/∂v = −R[u]×(vvᵀ + (Rᵀ − Id)[v]×)/‖v‖²` and
//!   `∂R/∂vᵢ = (vᵢ[v]× + [v × (Id − R)eᵢ]×) R / ‖v‖²`;
//! * the classical four-term expansion of the Rodrigues formula in `θ` and
//!   `v̄`.
//!
//! The compact forms divide by `‖v‖²`. Below [`EPS_SMALL`] they defer to the
//! classical expansion, whose coefficients `sinθ/θ` and `(1 − cosθ)/θ` are
//! series-guarded and which tends to the generators `[eᵢ]×` as `v → 0`.
//!
//! Layout: `∂(Ru)/∂v` is a 3×3 matrix whose column `i` is `∂(Ru)/∂vᵢ`;
//! `∂R/∂v` is three 3×3 blocks, or a 9×3 matrix whose column `i` is
//! `vec(∂R/∂vᵢ)` with column-major `vec`.

use crate::error::Error;
use crate::linalg::{Matrix3, Vector3};
use crate::so3::{hat, sinc, versine_over, ExpParts, Rotation, EPS_SMALL};

/// Largest `‖R − exp(v)‖_F` accepted by [`Linearization::with_rotation`].
pub const ROTATION_CONSISTENCY_TOL: f64 = 1e-10;
/// Agreement between the compact and classical forms (per entry).
pub const AGREEMENT_TOL: f64 = 1e-12;
/// Agreement between an analytic Jacobian and central differences.
pub const FD_AGREEMENT_TOL: f64 = 1e-8;
/// Bound on `‖DᵢᵀR + RᵀDᵢ‖_F`.
pub const TANGENCY_TOL: f64 = 1e-11;
/// Relative bound on the parallel-perturbation identity.
pub const PARALLEL_IDENTITY_TOL: f64 = 1e-12;
/// `‖∂R/∂vᵢ(t·v̄) − [eᵢ]×‖_F ≤ IDENTITY_LIMIT_SLOPE · t` near the identity.
pub const IDENTITY_LIMIT_SLOPE: f64 = 10.0;

/// The generators `Gᵢ = [eᵢ]×`, i.e. `∂R/∂vᵢ` at `v = 0`.
pub fn generators() -> [Matrix3; 3] {
    [0, 1, 2].map(|i| hat(&Vector3::basis(i)))
}

/// `∂(R(v)u)/∂v`; column `i` is the derivative with respect to `vᵢ`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct PointJacobian(Matrix3);

impl PointJacobian {
    pub fn matrix(&self) -> &Matrix3 {
        &self.0
    }

    pub fn column(&self, i: usize) -> Vector3 {
        self.0.column(i)
    }

    /// Directional derivative along `dv`.
    pub fn apply(&self, dv: &Vector3) -> Vector3 {
        self.0.mul_vec(dv)
    }
}

/// `∂R/∂vᵢ` for `i = 1, 2, 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RotationJacobian {
    blocks: [Matrix3; 3],
}

impl RotationJacobian {
    pub fn from_blocks(blocks: [Matrix3; 3]) -> Self {
        Self { blocks }
    }

    pub fn blocks(&self) -> &[Matrix3; 3] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &Matrix3 {
        &self.blocks[i]
    }

    /// The 9×3 view: row `k` of column `i` is `vec(∂R/∂vᵢ)[k]`.
    pub fn stacked(&self) -> [[f64; 3]; 9] {
        let vecs = self.blocks.map(|b| b.vec());
        core::array::from_fn(|k| [vecs[0][k], vecs[1][k], vecs[2][k]])
    }

    /// Contracts with a point: column `i` of the result is `(∂R/∂vᵢ) u`.
    pub fn apply_to_point(&self, u: &Vector3) -> PointJacobian {
        let [d0, d1, d2] = self.blocks;
        PointJacobian(Matrix3::from_columns(d0 * *u, d1 * *u, d2 * *u))
    }

    /// Largest per-entry difference to another Jacobian.
    pub fn max_abs_diff(&self, other: &RotationJacobian) -> f64 {
        (0..3).fold(0.0, |acc, i| acc.max((self.blocks[i] - other.blocks[i]).max_abs()))
    }
}

/// Everything needed to differentiate `R(v)` at one point `v`: the rotation
/// itself and the Rodrigues coefficients. Build it once and reuse it for many
/// points `u`.
#[derive(Clone, Copy, Debug)]
pub struct Linearization {
    v: Vector3,
    parts: ExpParts,
    rotation: Matrix3,
}

impl Linearization {
    pub fn new(v: &Vector3) -> Self {
        let parts = ExpParts::new(v);
        Self { v: *v, parts, rotation: parts.rotation() }
    }

    /// Pairs `v` with a rotation the caller already holds. The pair is
    /// rejected unless `‖R − exp(v)‖_F ≤` [`ROTATION_CONSISTENCY_TOL`].
    pub fn with_rotation(v: &Vector3, rotation: &Rotation) -> Result<Self, Error> {
        let parts = ExpParts::new(v);
        let deviation = rotation.matrix().distance(&parts.rotation());
        if !(deviation <= ROTATION_CONSISTENCY_TOL) {
            return Err(Error::InconsistentRotation { deviation });
        }
        Ok(Self { v: *v, parts, rotation: *rotation.matrix() })
    }

    pub fn v(&self) -> Vector3 {
        self.v
    }

    pub fn angle(&self) -> f64 {
        self.parts.theta
    }

    pub fn rotation(&self) -> Rotation {
        Rotation::from_matrix_unchecked(self.rotation)
    }

    /// `(∂R/∂v)` applied to `u`, from the compact formula.
    pub fn dpoint_compact(&self, u: &Vector3) -> PointJacobian {
        let theta = self.parts.theta;
        if theta < EPS_SMALL {
            return self.dpoint_classical(u);
        }
        let rt_minus_id = self.parts.rotation_minus_identity().transpose();
        let bracket = self.v.outer(&self.v) + rt_minus_id * self.parts.hat_v;
        let j = (self.rotation * hat(u) * bracket).scale(-1.0 / (theta * theta));
        PointJacobian(j)
    }

    /// `∂R/∂vᵢ` from the compact formula.
    pub fn drot_compact(&self) -> RotationJacobian {
        let theta = self.parts.theta;
        if theta < EPS_SMALL {
            return self.drot_classical();
        }
        let id_minus_r = -self.parts.rotation_minus_identity();
        let inv_sq = 1.0 / (theta * theta);
        let blocks = core::array::from_fn(|i| {
            let skew = self.parts.hat_v.scale(self.v[i]) + hat(&self.v.cross(&id_minus_r.column(i)));
            (skew * self.rotation).scale(inv_sq)
        });
        RotationJacobian { blocks }
    }

    /// `∂R/∂vᵢ` from the classical expansion
    /// `cosθ v̄ᵢ[v̄]× + sinθ v̄ᵢ[v̄]×² + (sinθ/θ)[eᵢ − v̄ᵢv̄]× + ((1−cosθ)/θ)(eᵢv̄ᵀ + v̄eᵢᵀ − 2v̄ᵢv̄v̄ᵀ)`.
    pub fn drot_classical(&self) -> RotationJacobian {
        let theta = self.parts.theta;
        if theta == 0.0 {
            return RotationJacobian { blocks: generators() };
        }
        let axis = self.v.scale(1.0 / theta);
        let hat_axis = hat(&axis);
        let hat_axis_sq = hat_axis * hat_axis;
        let axis_outer = axis.outer(&axis);
        let (sin, cos) = (libm::sin(theta), libm::cos(theta));
        let sinc = sinc(theta);
        let versine_over = versine_over(theta);
        let blocks = core::array::from_fn(|i| {
            let e = Vector3::basis(i);
            let a = axis[i];
            hat_axis.scale(cos * a)
                + hat_axis_sq.scale(sin * a)
                + hat(&(e - axis.scale(a))).scale(sinc)
                + (e.outer(&axis) + axis.outer(&e) - axis_outer.scale(2.0 * a)).scale(versine_over)
        });
        RotationJacobian { blocks }
    }

    /// Contraction of [`drot_classical`](Self::drot_classical) with `u`.
    pub fn dpoint_classical(&self, u: &Vector3) -> PointJacobian {
        self.drot_classical().apply_to_point(u)
    }

    /// First-order prediction of `R(v + dv)u`.
    pub fn taylor_predict(&self, u: &Vector3, dv: &Vector3) -> TaylorPrediction {
        let base = self.rotation * *u;
        let j = self.dpoint_compact(u);
        let theta = self.parts.theta;
        let (dv_parallel, dv_perpendicular, parallel_term, perpendicular_term) = if theta < EPS_SMALL {
            // no usable axis; the whole perturbation counts as a change of direction
            (Vector3::ZERO, *dv, Vector3::ZERO, j.apply(dv))
        } else {
            let axis = self.v.scale(1.0 / theta);
            let dv_parallel = axis.scale(axis.dot(dv));
            let dv_perpendicular = *dv - dv_parallel;
            let r_hat_u = self.rotation * hat(u);
            let parallel_term = -(r_hat_u * axis.scale(dv_parallel.dot(&axis)));
            let rt_minus_id = self.parts.rotation_minus_identity().transpose();
            let perpendicular_term = -(r_hat_u * (rt_minus_id * hat(&axis) * dv_perpendicular)).scale(1.0 / theta);
            (dv_parallel, dv_perpendicular, parallel_term, perpendicular_term)
        };
        TaylorPrediction {
            base,
            predicted: base + j.apply(dv),
            dv_parallel,
            dv_perpendicular,
            parallel_term,
            perpendicular_term,
        }
    }
}

/// First-order model of a rotated point under a perturbation of `v`, split
/// into the change of rotation angle (along the axis) and the change of axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorPrediction {
    /// `R(v)u`
    pub base: Vector3,
    /// `R(v)u + (∂(Ru)/∂v) dv`
    pub predicted: Vector3,
    pub dv_parallel: Vector3,
    pub dv_perpendicular: Vector3,
    /// `−R[u]× (dv∥·v̄) v̄`
    pub parallel_term: Vector3,
    /// `−R[u]× (Rᵀ − Id)[v̄]× dv⊥ / ‖v‖`
    pub perpendicular_term: Vector3,
}

pub fn dpoint_compact(v: &Vector3, u: &Vector3) -> PointJacobian {
    Linearization::new(v).dpoint_compact(u)
}

pub fn drot_compact(v: &Vector3) -> RotationJacobian {
    Linearization::new(v).drot_compact()
}

pub fn drot_classical(v: &Vector3) -> RotationJacobian {
    Linearization::new(v).drot_classical()
}

pub fn dpoint_classical(v: &Vector3, u: &Vector3) -> PointJacobian {
    Linearization::new(v).dpoint_classical(u)
}

pub fn taylor_predict(v: &Vector3, u: &Vector3, dv: &Vector3) -> TaylorPrediction {
    Linearization::new(v).taylor_predict(u, dv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::exp_rodrigues;

    const V: Vector3 = Vector3::new(0.4, -1.1, 0.2);

    #[test]
    fn first_generator_layout() {
        let [g1, g2, g3] = generators();
        assert_eq!(g1.rows(), [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]);
        assert_eq!(g1 * g2 - g2 * g1, g3);
        for (i, g) in generators().iter().enumerate() {
            assert_eq!(*g * Vector3::basis(i), Vector3::ZERO);
        }
    }

    #[test]
    fn both_forms_reduce_to_generators_at_zero() {
        assert_eq!(drot_classical(&Vector3::ZERO).blocks(), &generators());
        assert_eq!(drot_compact(&Vector3::ZERO).blocks(), &generators());
        let u = Vector3::new(1.0, 2.0, 3.0);
        assert_eq!(*dpoint_compact(&Vector3::ZERO, &u).matrix(), -hat(&u));
        assert_eq!(*dpoint_classical(&Vector3::ZERO, &u).matrix(), -hat(&u));
    }

    #[test]
    fn zero_point_gives_zero_jacobian() {
        assert_eq!(*dpoint_classical(&V, &Vector3::ZERO).matrix(), Matrix3::ZERO);
        assert_eq!(*dpoint_compact(&V, &Vector3::ZERO).matrix(), Matrix3::ZERO);
    }

    #[test]
    fn compact_matches_classical() {
        let diff = drot_compact(&V).max_abs_diff(&drot_classical(&V));
        assert!(diff <= AGREEMENT_TOL, "{diff:e}");
    }

    #[test]
    fn operator_form_consistency() {
        let u = Vector3::new(-0.3, 2.0, 0.7);
        let drot = drot_compact(&V);
        let dpoint = dpoint_compact(&V, &u);
        for i in 0..3 {
            assert!((*drot.block(i) * u - dpoint.column(i)).norm() <= 1e-12);
        }
    }

    #[test]
    fn stacked_view_is_column_major() {
        let jac = drot_compact(&V);
        let stacked = jac.stacked();
        for (i, block) in jac.blocks().iter().enumerate() {
            for r in 0..3 {
                for c in 0..3 {
                    assert_eq!(stacked[c * 3 + r][i], block[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn with_rotation_rejects_mismatched_pairs() {
        let r = exp_rodrigues(&V);
        assert!(Linearization::with_rotation(&V, &r).is_ok());
        let other = exp_rodrigues(&(V + Vector3::new(1e-6, 0.0, 0.0)));
        assert!(matches!(Linearization::with_rotation(&V, &other), Err(Error::InconsistentRotation { .. })));
    }

    #[test]
    fn parallel_perturbation_rotates_u_cross_axis() {
        let u = Vector3::new(1.0, 2.0, 3.0);
        let axis = V.scale(1.0 / V.norm());
        let r = exp_rodrigues(&V);
        let lhs = dpoint_compact(&V, &u).apply(&axis);
        let rhs = -(r * u.cross(&axis));
        assert!((lhs - rhs).norm() <= 1e-12 * u.norm());
    }

    #[test]
    fn taylor_terms_sum_to_prediction() {
        let u = Vector3::new(0.2, -0.4, 1.0);
        let dv = Vector3::new(1e-3, 2e-3, -5e-4);
        let p = taylor_predict(&V, &u, &dv);
        assert!((p.base + p.parallel_term + p.perpendicular_term - p.predicted).norm() < 1e-15);
        assert!((p.dv_parallel + p.dv_perpendicular - dv).norm() < 1e-18);
        assert!(p.dv_perpendicular.dot(&V).abs() < 1e-18);
        assert_eq!(taylor_predict(&V, &u, &Vector3::ZERO).predicted, exp_rodrigues(&V) * u);
    }
}
