use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Point3 { x, y, z }
    }

    pub fn zero() -> Self {
        Point3::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn dist_squared(self, o: Self) -> T {
        (self - o).norm_squared()
    }

    pub fn cross(self, o: Self) -> Self {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Real>(self) -> Point3<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        Point3::new(c(self.x), c(self.y), c(self.z))
    }
}

impl<T: Real> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Point3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T> Index<usize> for Point3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Point3 index {i} out of range"),
        }
    }
}

/// Ordered, non-empty set of finite 3D points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point3<T>>", into = "Vec<Point3<T>>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct PointCloud<T> {
    points: Vec<Point3<T>>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<Point3<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(PointCloud { points })
    }

    pub fn from_rows(rows: &[[T; 3]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| Point3::from_array(*r)).collect())
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> Point3<T> {
        self.points[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Point3<T>> {
        self.points.iter()
    }

    pub fn map(&self, f: impl Fn(Point3<T>) -> Point3<T>) -> Result<Self> {
        Self::new(self.points.iter().map(|&p| f(p)).collect())
    }

    /// Points reordered (or subset) by index.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        Self::new(indices.iter().map(|&i| self.points[i]).collect())
    }

    /// Row-major `n×3` coordinates.
    pub fn to_flat(&self) -> Vec<T> {
        self.points.iter().flat_map(|p| p.to_array()).collect()
    }

    pub fn cast<U: Real>(&self) -> PointCloud<U> {
        PointCloud { points: self.points.iter().map(|p| p.cast()).collect() }
    }
}

impl<T: Real> TryFrom<Vec<Point3<T>>> for PointCloud<T> {
    type Error = Error;
    fn try_from(points: Vec<Point3<T>>) -> Result<Self> {
        Self::new(points)
    }
}

impl<T> From<PointCloud<T>> for Vec<Point3<T>> {
    fn from(c: PointCloud<T>) -> Self {
        c.points
    }
}
