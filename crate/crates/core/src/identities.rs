//! Catalog of cross-product matrix identities, each evaluated on both sides.
//!
//! Residuals are reported both as an absolute Frobenius (or Euclidean) norm of
//! `lhs − rhs` and relative to `max(1, s)`, where `s` is the product of the
//! norms of the factors on either side. Rounding error in a product of
//! matrices scales with those factors rather than with the result, which
//! matters once `G⁻¹` enters.

use crate::linalg::{Matrix3, Vector3};
use crate::so3::hat;

/// Identities that need `G⁻¹` are skipped when `|det G|` is at or below this.
pub const MIN_ABS_DET: f64 = 1e-12;

/// Number of identities in the catalog.
pub const IDENTITY_COUNT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    /// `[a]× a = 0`
    KernelOfHat,
    /// `[a]× b = −[b]× a`
    FlipArguments,
    /// `[a]×[b]× = b aᵀ − (a·b) Id`
    ProductOfHats,
    /// `a × (b × c) = (a·c) b − (a·b) c`
    TripleProduct,
    /// `[a × b]× = b aᵀ − a bᵀ`
    HatOfCross,
    /// `[a × b]× = [a]×[b]× − [b]×[a]×`
    HatOfCrossAsCommutator,
    /// `[(Ga) × (Gb)]× = G [a × b]× Gᵀ`
    HatOfTransformedCross,
    /// `(Ga) × (Gb) = det(G) G⁻ᵀ (a × b)`
    TransformedCross,
    /// `[a]× G + Gᵀ [a]× = tr(G) [a]× − [Ga]×`
    TraceIdentity,
    /// `[Ga]× = det(G) G⁻ᵀ [a]× G⁻¹`
    HatOfTransformed,
}

impl Identity {
    pub const ALL: [Identity; IDENTITY_COUNT] = [
        Identity::KernelOfHat,
        Identity::FlipArguments,
        Identity::ProductOfHats,
        Identity::TripleProduct,
        Identity::HatOfCross,
        Identity::HatOfCrossAsCommutator,
        Identity::HatOfTransformedCross,
        Identity::TransformedCross,
        Identity::TraceIdentity,
        Identity::HatOfTransformed,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::KernelOfHat => "hat_kernel",
            Identity::FlipArguments => "flip_arguments",
            Identity::ProductOfHats => "product_of_hats",
            Identity::TripleProduct => "triple_product",
            Identity::HatOfCross => "hat_of_cross",
            Identity::HatOfCrossAsCommutator => "hat_of_cross_commutator",
            Identity::HatOfTransformedCross => "hat_of_transformed_cross",
            Identity::TransformedCross => "transformed_cross",
            Identity::TraceIdentity => "trace_identity",
            Identity::HatOfTransformed => "hat_of_transformed",
        }
    }

    pub fn needs_inverse(&self) -> bool {
        matches!(self, Identity::TransformedCross | Identity::HatOfTransformed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
}

impl Residual {
    fn of_matrices(lhs: Matrix3, rhs: Matrix3, scale: f64) -> Self {
        Self::from_absolute(lhs.distance(&rhs), scale.max(lhs.frobenius_norm()).max(rhs.frobenius_norm()))
    }

    fn of_vectors(lhs: Vector3, rhs: Vector3, scale: f64) -> Self {
        Self::from_absolute((lhs - rhs).norm(), scale.max(lhs.norm()).max(rhs.norm()))
    }

    fn from_absolute(absolute: f64, scale: f64) -> Self {
        Self { absolute, relative: absolute / scale.max(1.0) }
    }
}

/// Outcome of one identity: `None` means it was skipped because `G` was not
/// safely invertible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResult {
    pub identity: Identity,
    pub residual: Option<Residual>,
}

/// Evaluates both sides of every identity in [`Identity::ALL`] for the given
/// inputs.
pub fn identity_catalog_check(a: &Vector3, b: &Vector3, c: &Vector3, g: &Matrix3) -> [IdentityResult; IDENTITY_COUNT] {
    let ha = hat(a);
    let hb = hat(b);
    let a_cross_b = a.cross(b);
    let det = g.determinant();
    let g_inv = g.try_inverse(MIN_ABS_DET);

    let (na, nb, nc) = (a.norm(), b.norm(), c.norm());
    let ng = g.frobenius_norm();
    let ninv = g_inv.map_or(0.0, |inv| inv.frobenius_norm());

    Identity::ALL.map(|identity| {
        let residual = match identity {
            Identity::KernelOfHat => Some(Residual::of_vectors(ha * *a, Vector3::ZERO, na * na)),
            Identity::FlipArguments => Some(Residual::of_vectors(ha * *b, -(hb * *a), na * nb)),
            Identity::ProductOfHats => {
                Some(Residual::of_matrices(ha * hb, b.outer(a) - Matrix3::IDENTITY.scale(a.dot(b)), na * nb))
            }
            Identity::TripleProduct => {
                Some(Residual::of_vectors(a.cross(&b.cross(c)), b.scale(a.dot(c)) - c.scale(a.dot(b)), na * nb * nc))
            }
            Identity::HatOfCross => Some(Residual::of_matrices(hat(&a_cross_b), b.outer(a) - a.outer(b), na * nb)),
            Identity::HatOfCrossAsCommutator => {
                Some(Residual::of_matrices(hat(&a_cross_b), ha * hb - hb * ha, na * nb))
            }
            Identity::HatOfTransformedCross => Some(Residual::of_matrices(
                hat(&(*g * *a).cross(&(*g * *b))),
                *g * hat(&a_cross_b) * g.transpose(),
                ng * ng * na * nb,
            )),
            Identity::TransformedCross => g_inv.map(|inv| {
                Residual::of_vectors(
                    (*g * *a).cross(&(*g * *b)),
                    (inv.transpose() * a_cross_b).scale(det),
                    (ng * ng).max(det.abs() * ninv) * na * nb,
                )
            }),
            Identity::TraceIdentity => Some(Residual::of_matrices(
                ha * *g + g.transpose() * ha,
                ha.scale(g.trace()) - hat(&(*g * *a)),
                na * ng,
            )),
            Identity::HatOfTransformed => g_inv.map(|inv| {
                Residual::of_matrices(
                    hat(&(*g * *a)),
                    (inv.transpose() * ha * inv).scale(det),
                    ng.max(det.abs() * ninv * ninv) * na,
                )
            }),
        };
        IdentityResult { identity, residual }
    })
}

/// `‖[v̄]×² − (v̄v̄ᵀ − Id)‖_F`, zero for any unit `v̄`.
pub fn unit_axis_square_residual(axis: &Vector3) -> f64 {
    let h = hat(axis);
    (h * h).distance(&(axis.outer(axis) - Matrix3::IDENTITY))
}
