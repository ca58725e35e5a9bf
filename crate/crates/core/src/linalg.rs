//! Fixed-size 2-vector and 2x2 complex matrix arithmetic.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2(pub [Complex64; 2]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Vec2 {
    pub fn new(a: Complex64, b: Complex64) -> Vec2 {
        Vec2([a, b])
    }

    pub fn zero() -> Vec2 {
        Vec2::default()
    }

    /// Conjugate inner product `self* other`.
    #[inline]
    pub fn dot(&self, other: &Vec2) -> Complex64 {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.0[0].norm_sqr() + self.0[1].norm_sqr()
    }

    #[inline]
    pub fn scale(&self, s: Complex64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    #[inline]
    pub fn scale_re(&self, s: f64) -> Vec2 {
        Vec2([self.0[0] * s, self.0[1] * s])
    }

    /// Outer product `self other*`.
    pub fn outer(&self, other: &Vec2) -> Mat2 {
        Mat2([
            [self.0[0] * other.0[0].conj(), self.0[0] * other.0[1].conj()],
            [self.0[1] * other.0[0].conj(), self.0[1] * other.0[1].conj()],
        ])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Mat2 {
    pub fn identity() -> Mat2 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Mat2 {
        Mat2(m.map(|row| row.map(|v| Complex64::new(v, 0.0))))
    }

    /// Matrix whose columns are `a` and `b`.
    pub fn from_columns(a: Vec2, b: Vec2) -> Mat2 {
        Mat2([[a.0[0], b.0[0]], [a.0[1], b.0[1]]])
    }

    pub fn column(&self, k: usize) -> Vec2 {
        Vec2([self.0[0][k], self.0[1][k]])
    }

    pub fn scale_re(&self, s: f64) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|v| v * s)))
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det.norm() == 0.0 || !det.re.is_finite() || !det.im.is_finite() {
            return None;
        }
        let m = &self.0;
        let inv = det.inv();
        Some(Mat2([
            [m[1][1] * inv, -m[0][1] * inv],
            [-m[1][0] * inv, m[0][0] * inv],
        ]))
    }

    #[inline]
    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        Vec2([
            m[0][0] * v.0[0] + m[0][1] * v.0[1],
            m[1][0] * v.0[0] + m[1][1] * v.0[1],
        ])
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// Condition number in the spectral norm, for Hermitian positive
    /// semi-definite matrices.
    pub fn hermitian_condition(&self) -> f64 {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1].norm();
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let hi = mid + rad;
        let lo = mid - rad;
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] += o.0[r][c];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] -= o.0[r][c];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut out = Mat2::default();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = Mat2([[c(1.0, 0.5), c(-0.3, 2.0)], [c(0.7, -1.1), c(2.0, 0.0)]]);
        let inv = m.inverse().unwrap();
        assert!((m * inv).max_abs_diff(&Mat2::identity()) < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let v = Vec2::new(c(1.0, 0.0), c(2.0, 1.0));
        assert!(v.outer(&v).inverse().is_none());
    }

    #[test]
    fn condition_of_diagonal() {
        let m = Mat2::from_real([[4.0, 0.0], [0.0, 0.5]]);
        assert!((m.hermitian_condition() - 8.0).abs() < 1e-12);
    }
}
