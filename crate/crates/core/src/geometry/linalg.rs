//! 3×3 matrices and the symmetric eigen-solver used for principal directions.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::point::Point3;
use crate::scalar::Real;

/// Row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T>(pub [[T; 3]; 3]);

impl<T: Real> Mat3<T> {
    pub fn zeros() -> Self {
        Mat3([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = T::one();
        }
        m
    }

    pub fn from_rows(r0: Point3<T>, r1: Point3<T>, r2: Point3<T>) -> Self {
        Mat3([r0.to_array(), r1.to_array(), r2.to_array()])
    }

    pub fn from_diagonal(d: [T; 3]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn row(&self, i: usize) -> Point3<T> {
        Point3::from_array(self.0[i])
    }

    pub fn col(&self, j: usize) -> Point3<T> {
        Point3::new(self.0[0][j], self.0[1][j], self.0[2][j])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: Point3<T>) -> Point3<T> {
        Point3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn det(&self) -> T {
        self.row(0).dot(self.row(1).cross(self.row(2)))
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, o: &Self) -> T {
        let mut m = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((self.0[i][j] - o.0[i][j]).abs());
            }
        }
        m
    }

    /// Orthonormal with determinant +1, each within `tol`.
    pub fn is_rotation(&self, tol: T) -> bool {
        let rtr = self.transpose() * *self;
        rtr.max_abs_diff(&Self::identity()) <= tol && (self.det() - T::one()).abs() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// Rotation about the y axis by `angle` radians.
    pub fn rotation_y(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, l) = (T::zero(), T::one());
        Mat3([[c, o, s], [o, l, o], [-s, o, c]])
    }

    /// Rotation by `angle` radians about a unit `axis` (Rodrigues).
    pub fn rotation_axis_angle(axis: Point3<T>, angle: T) -> Self {
        let a = axis * (T::one() / axis.norm());
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        Mat3([
            [t * a.x * a.x + c, t * a.x * a.y - s * a.z, t * a.x * a.z + s * a.y],
            [t * a.x * a.y + s * a.z, t * a.y * a.y + c, t * a.y * a.z - s * a.x],
            [t * a.x * a.z - s * a.y, t * a.y * a.z + s * a.x, t * a.z * a.z + c],
        ])
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                r.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        r
    }
}

pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching unit
/// eigenvectors. Iterates until the off-diagonal Frobenius norm falls below
/// `1e-12` (relative to the matrix scale, never tighter than the scalar's
/// machine epsilon) or [`JACOBI_MAX_SWEEPS`] sweeps have run.
pub fn symmetric_eigen<T: Real>(m: &Mat3<T>) -> ([T; 3], [Point3<T>; 3]) {
    let mut a = m.0;
    let mut v = Mat3::<T>::identity().0;
    let scale = a.iter().flatten().fold(T::one(), |acc, x| acc.max(x.abs()));
    let tol = T::lit(1e-12).max(T::epsilon()) * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]).sqrt();
        if off < tol {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == T::zero() {
                continue;
            }
            let two = T::lit(2.0);
            let theta = (a[q][q] - a[p][p]) / (two * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;

            // A <- Jᵀ A J with J the (p, q) plane rotation.
            for row in a.iter_mut() {
                let (akp, akq) = (row[p], row[q]);
                row[p] = c * akp - s * akq;
                row[q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            a[p][q] = T::zero();
            a[q][p] = T::zero();

            for row in v.iter_mut() {
                let (vkp, vkq) = (row[p], row[q]);
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let vm = Mat3(v);
    let values = order.map(|i| a[i][i]);
    let vectors = order.map(|i| vm.col(i));
    (values, vectors)
}

/// Sign convention for eigenvectors: the largest-magnitude component is made
/// positive; when several components share that magnitude exactly, the
/// lowest-index nonzero component is made positive instead.
pub fn fix_sign<T: Real>(v: Point3<T>) -> Point3<T> {
    let a = v.to_array();
    let max = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let ties = a.iter().filter(|x| x.abs() == max).count();
    let pivot = if ties > 1 {
        a.iter().position(|x| *x != T::zero())
    } else {
        a.iter().position(|x| x.abs() == max)
    };
    match pivot {
        Some(i) if a[i] < T::zero() => -v,
        _ => v,
    }
}
