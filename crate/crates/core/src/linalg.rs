//! Fixed-size 3-vectors and 3×3 matrices.
//!
//! Matrices are indexed `(row, column)`. [`Matrix3::vec`] stacks columns
//! (column-major), which is the convention the Jacobian module uses for its
//! 9×3 view.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::error::Error;

/// A real 3-vector.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 3]", into = "[f64; 3]"))]
pub struct Vector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vector3 {
    pub const ZERO: Vector3 = Vector3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Constructs a vector, rejecting NaN and infinite components.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self, Error> {
        let v = Self::new(x, y, z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// The i-th standard basis vector, `i ∈ {0, 1, 2}`.
    pub const fn basis(i: usize) -> Self {
        match i {
            0 => Self::new(1.0, 0.0, 0.0),
            1 => Self::new(0.0, 1.0, 0.0),
            2 => Self::new(0.0, 0.0, 1.0),
            _ => panic!("basis index out of range"),
        }
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_squared())
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    /// `self · otherᵀ`.
    pub fn outer(&self, other: &Self) -> Matrix3 {
        let a = self.to_array();
        let b = other.to_array();
        let mut m = Matrix3::ZERO;
        for (r, ar) in a.iter().enumerate() {
            for (c, bc) in b.iter().enumerate() {
                m.m[r][c] = ar * bc;
            }
        }
        m
    }
}

impl From<[f64; 3]> for Vector3 {
    fn from(a: [f64; 3]) -> Self {
        Self::from_array(a)
    }
}

impl From<Vector3> for [f64; 3] {
    fn from(v: Vector3) -> Self {
        v.to_array()
    }
}

impl Index<usize> for Vector3 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vector3 index {i} out of range"),
        }
    }
}

impl IndexMut<usize> for Vector3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        match i {
            0 => &mut self.x,
            1 => &mut self.y,
            2 => &mut self.z,
            _ => panic!("Vector3 index {i} out of range"),
        }
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vector3 {
    fn add_assign(&mut self, o: Vector3) {
        *self = *self + o;
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, o: Vector3) -> Vector3 {
        Vector3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vector3 {
    fn sub_assign(&mut self, o: Vector3) {
        *self = *self - o;
    }
}

impl Neg for Vector3 {
    type Output = Vector3;
    fn neg(self) -> Vector3 {
        Vector3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vector3 {
    type Output = Vector3;
    fn mul(self, s: f64) -> Vector3 {
        self.scale(s)
    }
}

impl Mul<Vector3> for f64 {
    type Output = Vector3;
    fn mul(self, v: Vector3) -> Vector3 {
        v.scale(self)
    }
}

/// A dense real 3×3 matrix stored row by row.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]"))]
pub struct Matrix3 {
    m: [[f64; 3]; 3],
}

impl Matrix3 {
    pub const ZERO: Matrix3 = Matrix3 { m: [[0.0; 3]; 3] };
    pub const IDENTITY: Matrix3 = Matrix3 { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };

    pub const fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    /// Constructs a matrix, rejecting NaN and infinite entries.
    pub fn try_from_rows(m: [[f64; 3]; 3]) -> Result<Self, Error> {
        let out = Self::from_rows(m);
        if out.is_finite() {
            Ok(out)
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Builds a matrix from nine entries in row-major order.
    pub fn from_row_major(a: [f64; 9]) -> Self {
        Self::from_rows([[a[0], a[1], a[2]], [a[3], a[4], a[5]], [a[6], a[7], a[8]]])
    }

    pub fn from_columns(c0: Vector3, c1: Vector3, c2: Vector3) -> Self {
        Self::from_rows([[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]])
    }

    pub fn from_diagonal(d: Vector3) -> Self {
        Self::from_rows([[d.x, 0.0, 0.0], [0.0, d.y, 0.0], [0.0, 0.0, d.z]])
    }

    pub const fn rows(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]]
    }

    /// Column-major stacking of the entries (`vec(M)`).
    pub fn vec(&self) -> [f64; 9] {
        self.transpose().row_major()
    }

    pub fn column(&self, c: usize) -> Vector3 {
        Vector3::new(self.m[0][c], self.m[1][c], self.m[2][c])
    }

    pub fn row(&self, r: usize) -> Vector3 {
        Vector3::from_array(self.m[r])
    }

    pub fn diagonal(&self) -> Vector3 {
        Vector3::new(self.m[0][0], self.m[1][1], self.m[2][2])
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.m;
        Self::from_rows([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Adjugate (transpose of the cofactor matrix), so that `M · adj(M) = det(M) Id`.
    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        Self::from_rows([
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
            ],
            [
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
            ],
            [
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ])
    }

    /// Inverse via the adjugate; `None` when `|det| <= min_abs_det`.
    pub fn try_inverse(&self, min_abs_det: f64) -> Option<Self> {
        let det = self.determinant();
        if !(det.abs() > min_abs_det) {
            return None;
        }
        Some(self.adjugate().scale(1.0 / det))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.m.iter_mut().flatten().for_each(|x| *x *= s);
        out
    }

    pub fn mul_vec(&self, v: &Vector3) -> Vector3 {
        Vector3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.m.iter().flatten().map(|x| x * x).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).frobenius_norm()
    }
}

impl From<[[f64; 3]; 3]> for Matrix3 {
    fn from(m: [[f64; 3]; 3]) -> Self {
        Self::from_rows(m)
    }
}

impl From<Matrix3> for [[f64; 3]; 3] {
    fn from(m: Matrix3) -> Self {
        m.rows()
    }
}

impl Index<(usize, usize)> for Matrix3 {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.m[r][c]
    }
}

impl IndexMut<(usize, usize)> for Matrix3 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.m[r][c]
    }
}

impl Add for Matrix3 {
    type Output = Matrix3;
    fn add(mut self, o: Matrix3) -> Matrix3 {
        self += o;
        self
    }
}

impl AddAssign for Matrix3 {
    fn add_assign(&mut self, o: Matrix3) {
        for (a, b) in self.m.iter_mut().flatten().zip(o.m.iter().flatten()) {
            *a += b;
        }
    }
}

impl Sub for Matrix3 {
    type Output = Matrix3;
    fn sub(mut self, o: Matrix3) -> Matrix3 {
        self -= o;
        self
    }
}

impl SubAssign for Matrix3 {
    fn sub_assign(&mut self, o: Matrix3) {
        for (a, b) in self.m.iter_mut().flatten().zip(o.m.iter().flatten()) {
            *a -= b;
        }
    }
}

impl Neg for Matrix3 {
    type Output = Matrix3;
    fn neg(self) -> Matrix3 {
        self.scale(-1.0)
    }
}

impl Mul for Matrix3 {
    type Output = Matrix3;
    fn mul(self, o: Matrix3) -> Matrix3 {
        let mut out = Matrix3::ZERO;
        for r in 0..3 {
            for c in 0..3 {
                out.m[r][c] = self.m[r][0] * o.m[0][c] + self.m[r][1] * o.m[1][c] + self.m[r][2] * o.m[2][c];
            }
        }
        out
    }
}

impl Mul<Vector3> for Matrix3 {
    type Output = Vector3;
    fn mul(self, v: Vector3) -> Vector3 {
        self.mul_vec(&v)
    }
}

impl Mul<f64> for Matrix3 {
    type Output = Matrix3;
    fn mul(self, s: f64) -> Matrix3 {
        self.scale(s)
    }
}

impl Mul<Matrix3> for f64 {
    type Output = Matrix3;
    fn mul(self, m: Matrix3) -> Matrix3 {
        m.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_is_column_major() {
        let m = Matrix3::from_row_major([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(m.vec(), [1.0, 4.0, 7.0, 2.0, 5.0, 8.0, 3.0, 6.0, 9.0]);
    }

    #[test]
    fn adjugate_inverts() {
        let m = Matrix3::from_row_major([2.0, -1.0, 0.5, 0.3, 4.0, 1.0, -2.0, 0.0, 3.0]);
        let inv = m.try_inverse(1e-12).unwrap();
        assert!((m * inv).distance(&Matrix3::IDENTITY) < 1e-14);
        assert!(Matrix3::ZERO.try_inverse(1e-12).is_none());
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Vector3::try_new(f64::NAN, 0.0, 0.0), Err(Error::NonFinite));
        assert!(Matrix3::try_from_rows([[0.0, f64::INFINITY, 0.0], [0.0; 3], [0.0; 3]]).is_err());
    }

    #[test]
    fn cross_is_right_handed() {
        let e = |i| Vector3::basis(i);
        assert_eq!(e(0).cross(&e(1)), e(2));
        assert_eq!(e(1).cross(&e(2)), e(0));
        assert_eq!(e(2).cross(&e(0)), e(1));
    }
}
