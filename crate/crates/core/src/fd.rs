//! Central finite differences, the reference every analytic derivative is
//! checked against.

use alloc::vec::Vec;
use core::convert::Infallible;

use crate::jacobian::{PointJacobian, RotationJacobian};
use crate::linalg::{Matrix3, Vector3};
use crate::so3::exp_rodrigues;

/// Default step `1e-5 · max(1, ‖v‖)`.
pub fn default_step(v: &Vector3) -> f64 {
    1e-5 * v.norm().max(1.0)
}

/// An N×3 Jacobian, one row per output component.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseJacobian {
    pub rows: Vec<[f64; 3]>,
}

impl DenseJacobian {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn max_abs_diff(&self, other: &DenseJacobian) -> f64 {
        assert_eq!(self.len(), other.len(), "Jacobian shapes differ");
        self.rows.iter().flatten().zip(other.rows.iter().flatten()).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Interprets a 3×3 result (e.g. of `v ↦ R(v)u`) as a matrix.
    pub fn to_matrix3(&self) -> Matrix3 {
        assert_eq!(self.len(), 3, "not a 3×3 Jacobian");
        Matrix3::from_rows([self.rows[0], self.rows[1], self.rows[2]])
    }

    /// Interprets a 9×3 result of `v ↦ vec(R(v))` as three blocks.
    pub fn to_rotation_jacobian(&self) -> RotationJacobian {
        assert_eq!(self.len(), 9, "not a 9×3 Jacobian");
        RotationJacobian::from_blocks(core::array::from_fn(|i| {
            let mut block = Matrix3::ZERO;
            for c in 0..3 {
                for r in 0..3 {
                    block[(r, c)] = self.rows[c * 3 + r][i];
                }
            }
            block
        }))
    }
}

/// `(f(v + h·eᵢ) − f(v − h·eᵢ)) / 2h` for each column `i`.
///
/// # Panics
///
/// If `h` is not positive and finite, or if `f` returns outputs of differing
/// lengths.
pub fn fd_jacobian<F, E>(mut f: F, v: &Vector3, h: f64) -> Result<DenseJacobian, E>
where
    F: FnMut(&Vector3) -> Result<Vec<f64>, E>,
{
    assert!(h > 0.0 && h.is_finite(), "finite-difference step must be positive, got {h}");
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for i in 0..3 {
        let step = Vector3::basis(i).scale(h);
        let plus = f(&(*v + step))?;
        let minus = f(&(*v - step))?;
        assert_eq!(plus.len(), minus.len(), "output length changed between evaluations");
        if i == 0 {
            rows.resize(plus.len(), [0.0; 3]);
        }
        assert_eq!(plus.len(), rows.len(), "output length changed between evaluations");
        for (row, (p, m)) in rows.iter_mut().zip(plus.iter().zip(&minus)) {
            row[i] = (p - m) / (2.0 * h);
        }
    }
    Ok(DenseJacobian { rows })
}

/// One Richardson step on the central difference, `(4·D(h/2) − D(h)) / 3`,
/// which cancels the `h²` error term.
pub fn fd_jacobian_extrapolated<F, E>(mut f: F, v: &Vector3, h: f64) -> Result<DenseJacobian, E>
where
    F: FnMut(&Vector3) -> Result<Vec<f64>, E>,
{
    let coarse = fd_jacobian(&mut f, v, h)?;
    let mut fine = fd_jacobian(&mut f, v, 0.5 * h)?;
    for (f_row, c_row) in fine.rows.iter_mut().zip(&coarse.rows) {
        for (x, c) in f_row.iter_mut().zip(c_row) {
            *x = (4.0 * *x - c) / 3.0;
        }
    }
    Ok(fine)
}

fn rotated_point(u: Vector3) -> impl FnMut(&Vector3) -> Result<Vec<f64>, Infallible> {
    move |v| Ok((exp_rodrigues(v) * u).to_array().to_vec())
}

fn vec_rotation(v: &Vector3) -> Result<Vec<f64>, Infallible> {
    Ok(exp_rodrigues(v).matrix().vec().to_vec())
}

fn unwrap_infallible<T>(r: Result<T, Infallible>) -> T {
    match r {
        Ok(t) => t,
        Err(never) => match never {},
    }
}

/// Central-difference estimate of `∂(R(v)u)/∂v`.
pub fn fd_point_jacobian(v: &Vector3, u: &Vector3, h: f64) -> PointJacobianEstimate {
    PointJacobianEstimate(unwrap_infallible(fd_jacobian(rotated_point(*u), v, h)).to_matrix3())
}

/// Central-difference estimate of `∂R/∂vᵢ`.
pub fn fd_rotation_jacobian(v: &Vector3, h: f64) -> RotationJacobian {
    unwrap_infallible(fd_jacobian(vec_rotation, v, h)).to_rotation_jacobian()
}

/// Richardson-extrapolated estimate of `∂R/∂vᵢ`, accurate to `O(h⁴)`.
pub fn fd_rotation_jacobian_extrapolated(v: &Vector3, h: f64) -> RotationJacobian {
    unwrap_infallible(fd_jacobian_extrapolated(vec_rotation, v, h)).to_rotation_jacobian()
}

/// Richardson-extrapolated estimate of `∂(R(v)u)/∂v`.
pub fn fd_point_jacobian_extrapolated(v: &Vector3, u: &Vector3, h: f64) -> PointJacobianEstimate {
    PointJacobianEstimate(unwrap_infallible(fd_jacobian_extrapolated(rotated_point(*u), v, h)).to_matrix3())
}

/// A numerically estimated `∂(Ru)/∂v`, kept distinct from the analytic
/// [`PointJacobian`] so the two cannot be confused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointJacobianEstimate(pub Matrix3);

impl PointJacobianEstimate {
    pub fn max_abs_diff(&self, analytic: &PointJacobian) -> f64 {
        (self.0 - *analytic.matrix()).max_abs()
    }
}
