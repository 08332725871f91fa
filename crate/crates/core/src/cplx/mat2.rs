//! 2x2 complex matrices and row 2-vectors.

use crate::{LabError, Result, C64};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2C {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
}

impl Mat2C {
    pub const fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Mat2C { m11, m12, m21, m22 }
    }

    pub fn from_real(a: [[f64; 2]; 2]) -> Self {
        Mat2C::new(a[0][0].into(), a[0][1].into(), a[1][0].into(), a[1][1].into())
    }

    pub fn identity() -> Self {
        Mat2C::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2C::new(a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), d)
    }

    /// `x^{sigma_3} = diag(x, 1/x)`.
    pub fn sigma3_pow(x: C64) -> Self {
        Mat2C::diag(x, x.inv())
    }

    /// `e^{x sigma_3}`.
    pub fn exp_sigma3(x: C64) -> Self {
        Mat2C::diag(x.exp(), (-x).exp())
    }

    pub fn sigma1() -> Self {
        Mat2C::from_real([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> C64 {
        self.m11 + self.m22
    }

    /// Inverse through the adjugate.
    pub fn inv(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < 1e-300 || !d.norm().is_finite() {
            return Err(LabError::Singular(d.norm()));
        }
        Ok(Mat2C::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d))
    }

    /// `sigma_1 M sigma_1`.
    pub fn sigma1_conj(&self) -> Self {
        Mat2C::new(self.m22, self.m21, self.m12, self.m11)
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2C::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dist(&self, other: &Mat2C) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.m11 - o.m11, self.m12 - o.m12, self.m21 - o.m21, self.m22 - o.m22)
    }
}

/// Row vector `(m1, m2)`; RHP solutions are row vectors multiplied from the right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowVec(pub C64, pub C64);

impl RowVec {
    pub fn mul_mat(self, m: &Mat2C) -> RowVec {
        RowVec(self.0 * m.m11 + self.1 * m.m21, self.0 * m.m12 + self.1 * m.m22)
    }

    pub fn dist(self, o: RowVec) -> f64 {
        (self.0 - o.0).norm().max((self.1 - o.1).norm())
    }

    pub fn swap(self) -> RowVec {
        RowVec(self.1, self.0)
    }
}
