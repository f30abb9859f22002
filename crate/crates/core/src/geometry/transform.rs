use serde::{Deserialize, Serialize};

use super::linalg::Mat3;
use super::point::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance on `RᵀR = I` and `det R = 1`.
pub const ROTATION_TOL: f64 = 1e-9;

/// `v ↦ R·v + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform<T> {
    rotation: Mat3<T>,
    translation: Point3<T>,
}

impl<T: Real> RigidTransform<T> {
    pub fn new(rotation: Mat3<T>, translation: Point3<T>) -> Result<Self> {
        // Single precision cannot hold 1e-9; fall back to a few ulps there.
        let tol = T::lit(ROTATION_TOL).max(T::epsilon() * T::lit(16.0));
        if !rotation.is_finite() || !translation.is_finite() {
            return Err(Error::InvalidRotation("non-finite entries".into()));
        }
        if !rotation.is_rotation(tol) {
            return Err(Error::InvalidRotation(format!(
                "not a proper rotation (det = {})",
                rotation.det()
            )));
        }
        Ok(RigidTransform { rotation, translation })
    }

    pub fn identity() -> Self {
        RigidTransform { rotation: Mat3::identity(), translation: Point3::zero() }
    }

    pub fn rotation(&self) -> &Mat3<T> {
        &self.rotation
    }

    pub fn translation(&self) -> Point3<T> {
        self.translation
    }

    pub fn apply_point(&self, p: Point3<T>) -> Point3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    /// `self ∘ first`: applies `first`, then `self`.
    pub fn compose(&self, first: &Self) -> Self {
        RigidTransform {
            rotation: self.rotation * first.rotation,
            translation: self.rotation.mul_vec(first.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        RigidTransform { rotation: rt, translation: -rt.mul_vec(self.translation) }
    }

    fn is_exact_identity(&self) -> bool {
        self.rotation == Mat3::identity() && self.translation == Point3::zero()
    }
}

/// Applies `T(v) = R·v + t` to every point.
pub fn apply_rigid<T: Real>(cloud: &PointCloud<T>, transform: &RigidTransform<T>) -> Result<PointCloud<T>> {
    // Re-validate: the fields are private, but deserialized values bypass `new`.
    let checked = RigidTransform::new(transform.rotation, transform.translation)?;
    if checked.is_exact_identity() {
        return Ok(cloud.clone());
    }
    cloud.map(|p| checked.apply_point(p))
}

/// Record of a centre-and-scale normalization: `v ↦ (v − center) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord<T> {
    pub center: Point3<T>,
    pub scale: T,
}

impl<T: Real> ScaleRecord<T> {
    pub fn identity() -> Self {
        ScaleRecord { center: Point3::zero(), scale: T::one() }
    }

    pub fn apply_point(&self, p: Point3<T>) -> Point3<T> {
        (p - self.center) * (T::one() / self.scale)
    }

    pub fn invert_point(&self, p: Point3<T>) -> Point3<T> {
        p * self.scale + self.center
    }
}
