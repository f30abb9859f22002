//! First and second order geometric moments and the canonical pose they define.

use serde::{Deserialize, Serialize};

use super::linalg::{fix_sign, symmetric_eigen, Mat3};
use super::point::{Point3, PointCloud};
use super::transform::{RigidTransform, ScaleRecord};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative eigenvalue gap (fraction of the trace) below which two principal
/// directions are reported as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-6;

/// Component-wise mean of the points.
pub fn centroid<T: Real>(cloud: &PointCloud<T>) -> Point3<T> {
    let n = T::from_usize(cloud.len()).expect("point count fits scalar");
    let sum = cloud.iter().fold(Point3::zero(), |acc, &p| acc + p);
    Point3::new(sum.x / n, sum.y / n, sum.z / n)
}

/// `Σ = Σⱼ xⱼxⱼᵀ` about the origin. Exactly symmetric: the upper triangle is
/// accumulated and mirrored.
pub fn second_moment_matrix<T: Real>(cloud: &PointCloud<T>) -> Mat3<T> {
    second_moment_about(cloud, Point3::zero())
}

fn second_moment_about<T: Real>(cloud: &PointCloud<T>, origin: Point3<T>) -> Mat3<T> {
    let mut upper = [T::zero(); 6];
    for &p in cloud.iter() {
        let q = p - origin;
        upper[0] += q.x * q.x;
        upper[1] += q.x * q.y;
        upper[2] += q.x * q.z;
        upper[3] += q.y * q.y;
        upper[4] += q.y * q.z;
        upper[5] += q.z * q.z;
    }
    let [xx, xy, xz, yy, yz, zz] = upper;
    Mat3([[xx, xy, xz], [xy, yy, yz], [xz, yz, zz]])
}

/// Translates the centroid to the origin and scales so the farthest point
/// lies on the unit sphere.
pub fn normalize_to_unit_sphere<T: Real>(cloud: &PointCloud<T>) -> Result<(PointCloud<T>, ScaleRecord<T>)> {
    let center = centroid(cloud);
    let radius = cloud.iter().map(|&p| (p - center).norm()).fold(T::zero(), T::max);
    if radius <= T::zero() {
        return Err(Error::ZeroExtent);
    }
    let record = ScaleRecord { center, scale: radius };
    Ok((cloud.map(|p| record.apply_point(p))?, record))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary<T> {
    pub centroid: Point3<T>,
    /// Second-moment matrix of the centred cloud.
    pub sigma: Mat3<T>,
    /// Descending.
    pub eigenvalues: [T; 3],
    /// Unit principal directions `d₁, d₂, d₃`, sign-fixed by [`fix_sign`].
    pub directions: [Point3<T>; 3],
    /// Near-equal eigenvalue flags for the pairs (1,2), (1,3), (2,3).
    pub degenerate: [bool; 3],
}

impl<T: Real> MomentSummary<T> {
    pub fn is_unique(&self) -> bool {
        !self.degenerate.iter().any(|&d| d)
    }
}

/// Centroid, centred second moments, and principal directions of a cloud.
pub fn principal_directions<T: Real>(cloud: &PointCloud<T>) -> MomentSummary<T> {
    let c = centroid(cloud);
    let sigma = second_moment_about(cloud, c);
    let (eigenvalues, vectors) = symmetric_eigen(&sigma);
    let directions = vectors.map(fix_sign);
    let gap = T::lit(DEGENERACY_RTOL) * sigma.trace();
    let close = |i: usize, j: usize| (eigenvalues[i] - eigenvalues[j]).abs() <= gap;
    MomentSummary {
        centroid: c,
        sigma,
        eigenvalues,
        directions,
        degenerate: [close(0, 1), close(0, 2), close(1, 2)],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Canonical<T> {
    pub cloud: PointCloud<T>,
    pub transform: RigidTransform<T>,
    pub summary: MomentSummary<T>,
}

impl<T: Real> Canonical<T> {
    /// False when a degenerate spectrum leaves some axes undetermined.
    pub fn is_unique(&self) -> bool {
        self.summary.is_unique()
    }
}

/// Moves the centroid to the origin and the principal directions onto the
/// coordinate axes (`d₁ → x`, `d₂ → y`).
///
/// The third axis is `d₁ × d₂` so the applied transform is a proper rotation;
/// it may therefore differ in sign from `summary.directions[2]`.
pub fn canonicalize<T: Real>(cloud: &PointCloud<T>) -> Result<Canonical<T>> {
    let summary = principal_directions(cloud);
    let [d1, d2, _] = summary.directions;
    let rotation = Mat3::from_rows(d1, d2, d1.cross(d2));
    let transform = RigidTransform::new(rotation, -rotation.mul_vec(summary.centroid))?;
    let cloud = cloud.map(|p| transform.apply_point(p))?;
    Ok(Canonical { cloud, transform, summary })
}
