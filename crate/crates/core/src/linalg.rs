//! 2×2 real matrices: products, inverse, and closed-form eigenvalues.

use core::ops::Mul;

use num_complex::Complex64;

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[f64; 2]; 2],
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { m: [[1.0, 0.0], [0.0, 1.0]] };

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { m: [[a11, a12], [a21, a22]] }
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let a = &self.m;
        let b = &other.m;
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }

    /// Solves `self · v = rhs`; `None` when the matrix is numerically singular.
    pub fn solve(&self, rhs: [f64; 2]) -> Option<[f64; 2]> {
        let det = self.det();
        let scale = self.max_abs();
        if det == 0.0 || !det.is_finite() || libm::fabs(det) <= 1e-300 * scale * scale {
            return None;
        }
        let m = &self.m;
        Some([(m[1][1] * rhs[0] - m[0][1] * rhs[1]) / det, (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |acc, v| if libm::fabs(*v) > acc { libm::fabs(*v) } else { acc })
    }

    /// Eigenvalues from the characteristic polynomial `λ² − tr λ + det`.
    ///
    /// Real pairs use the cancellation-free form (larger root first, the other
    /// as `det / λ1`), so `λ1 + λ2 = tr` and `λ1 λ2 = det` hold to rounding.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let tr = self.trace();
        let det = self.det();
        let half = 0.5 * tr;
        let disc = half * half - det;
        if disc >= 0.0 {
            let root = libm::sqrt(disc);
            let big = if half >= 0.0 { half + root } else { half - root };
            let small = if big != 0.0 { det / big } else { half - root };
            [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
        } else {
            let im = libm::sqrt(-disc);
            [Complex64::new(half, im), Complex64::new(half, -im)]
        }
    }

    /// Unit eigenvector for a real eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> [f64; 2] {
        let m = &self.m;
        // (A - λI) v = 0: take the row with the larger entries for stability.
        let r0 = [m[0][0] - lambda, m[0][1]];
        let r1 = [m[1][0], m[1][1] - lambda];
        let n0 = libm::fabs(r0[0]) + libm::fabs(r0[1]);
        let n1 = libm::fabs(r1[0]) + libm::fabs(r1[1]);
        let row = if n0 >= n1 { r0 } else { r1 };
        let v = if row[0] == 0.0 && row[1] == 0.0 { [1.0, 0.0] } else { [-row[1], row[0]] };
        let norm = libm::hypot(v[0], v[1]);
        [v[0] / norm, v[1] / norm]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.m;
        let b = &rhs.m;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}
