//! Rotations in exponential coordinates and their analytic derivatives.
//!
//! The crate is `no_std` (it needs `alloc` for the solver and the generic
//! finite-difference routine). Transcendental functions come from `libm`, so
//! results are bit-identical with and without the `std` feature.
//!
//! * [`so3`]: `hat`/`vee`, the exponential map (Rodrigues, its `v̄v̄ᵀ` form, and
//!   the truncated power series) and the logarithm.
//! * [`jacobian`]: `∂(R(v)u)/∂v` and `∂R/∂vᵢ` in compact and classical form.
//! * [`fd`]: central-difference and Richardson-extrapolated reference Jacobians.
//! * [`identities`]: the cross-product identity catalog.
//! * [`solver`]: rotation fitting from point correspondences.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x <= tol)` is deliberate: it rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod fd;
pub mod identities;
pub mod jacobian;
pub mod linalg;
pub mod sampling;
pub mod so3;
pub mod solver;

pub use error::{Error, RotationInvariant};
pub use jacobian::{Linearization, PointJacobian, RotationJacobian};
pub use linalg::{Matrix3, Vector3};
pub use so3::{AxisAngle, Rotation, RotationVector};
