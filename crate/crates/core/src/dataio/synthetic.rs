//! Procedural primitive shapes used as a small classification benchmark.
//!
//! Each shape is sampled uniformly by surface area in a canonical pose whose
//! symmetry axis (where there is one) is `y`, then rotated about `y` by a
//! random angle, perturbed with Gaussian noise and normalized to the unit
//! sphere.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::surface::triangle_point;
use crate::error::{Error, Result};
use crate::geometry::{normalize_to_unit_sphere, Mat3, Point3, PointCloud};
use crate::rng;
use crate::scalar::Real;

pub const MIN_SYNTHETIC_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Sphere,
    Cube,
    Cylinder,
    Cone,
    Torus,
    Pyramid,
    Ellipsoid,
    Capsule,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 8] = [
        ShapeKind::Sphere,
        ShapeKind::Cube,
        ShapeKind::Cylinder,
        ShapeKind::Cone,
        ShapeKind::Torus,
        ShapeKind::Pyramid,
        ShapeKind::Ellipsoid,
        ShapeKind::Capsule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Sphere => "sphere",
            ShapeKind::Cube => "cube",
            ShapeKind::Cylinder => "cylinder",
            ShapeKind::Cone => "cone",
            ShapeKind::Torus => "torus",
            ShapeKind::Pyramid => "pyramid",
            ShapeKind::Ellipsoid => "ellipsoid",
            ShapeKind::Capsule => "capsule",
        }
    }

    /// Allowed `[min, max]` range of each size parameter:
    ///
    /// | kind      | parameters                       |
    /// |-----------|----------------------------------|
    /// | sphere    | radius                           |
    /// | cube      | half extent                      |
    /// | cylinder  | radius, height                   |
    /// | cone      | base radius, height              |
    /// | torus     | major radius, minor radius       |
    /// | pyramid   | base half side, height           |
    /// | ellipsoid | semi-axes along x, y, z          |
    /// | capsule   | radius, straight section height  |
    pub fn param_ranges(self) -> &'static [[f64; 2]] {
        match self {
            ShapeKind::Sphere => &[[0.5, 1.5]],
            ShapeKind::Cube => &[[0.5, 1.5]],
            ShapeKind::Cylinder => &[[0.3, 0.7], [1.0, 2.0]],
            ShapeKind::Cone => &[[0.4, 0.8], [1.0, 2.0]],
            ShapeKind::Torus => &[[0.7, 1.0], [0.15, 0.35]],
            ShapeKind::Pyramid => &[[0.5, 0.9], [0.8, 1.6]],
            ShapeKind::Ellipsoid => &[[1.0, 1.4], [0.4, 0.7], [0.7, 0.95]],
            ShapeKind::Capsule => &[[0.3, 0.5], [0.8, 1.5]],
        }
    }

    /// Size parameters drawn uniformly from [`Self::param_ranges`].
    pub fn random_params(self, rng: &mut impl Rng) -> Vec<f64> {
        self.param_ranges().iter().map(|[lo, hi]| rng.random_range(*lo..=*hi)).collect()
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ShapeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownShape(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticShapeRecipe {
    pub kind: ShapeKind,
    pub params: Vec<f64>,
    /// Seeds the rotation, surface sampling and noise.
    pub pose_seed: u64,
    pub noise_sigma: f64,
    pub num_points: usize,
}

impl SyntheticShapeRecipe {
    /// Recipe with size parameters drawn from `seed`.
    pub fn random(kind: ShapeKind, seed: u64, noise_sigma: f64, num_points: usize) -> Self {
        let mut r = rng::seeded(rng::derive_seed(seed, 0x5123));
        SyntheticShapeRecipe { kind, params: kind.random_params(&mut r), pose_seed: seed, noise_sigma, num_points }
    }

    pub fn validate(&self) -> Result<()> {
        let ranges = self.kind.param_ranges();
        if self.params.len() != ranges.len() {
            return Err(Error::config(
                "params",
                format!("{} takes {} size parameters, got {}", self.kind, ranges.len(), self.params.len()),
            ));
        }
        for (i, (&v, [lo, hi])) in self.params.iter().zip(ranges).enumerate() {
            if !(v >= *lo && v <= *hi) {
                return Err(Error::config(format!("params[{i}]"), format!("{v} outside [{lo}, {hi}] for {}", self.kind)));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config("noise_sigma", "must be finite and >= 0"));
        }
        if self.num_points < MIN_SYNTHETIC_POINTS {
            return Err(Error::config("num_points", format!("must be >= {MIN_SYNTHETIC_POINTS}")));
        }
        Ok(())
    }

    pub fn label(&self, classes: &[ShapeKind]) -> Option<usize> {
        classes.iter().position(|&k| k == self.kind)
    }
}

fn unit_vector(rng: &mut impl Rng) -> Point3<f64> {
    loop {
        let v = Point3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        let n = v.norm();
        if n > 1e-12 {
            return v * (1.0 / n);
        }
    }
}

fn disk_point(rng: &mut impl Rng, radius: f64, y: f64) -> Point3<f64> {
    let rr = radius * rng.random::<f64>().sqrt();
    let t = rng.random::<f64>() * TAU;
    Point3::new(rr * t.cos(), y, rr * t.sin())
}

/// Index drawn with probability proportional to `weights`.
fn pick(rng: &mut impl Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if target < w {
            return i;
        }
        target -= w;
    }
    weights.len() - 1
}

fn sample_triangles(rng: &mut impl Rng, tris: &[[Point3<f64>; 3]]) -> Point3<f64> {
    let areas: Vec<f64> = tris.iter().map(|[a, b, c]| (*b - *a).cross(*c - *a).norm() * 0.5).collect();
    let [a, b, c] = tris[pick(rng, &areas)];
    triangle_point(a, b, c, rng.random(), rng.random())
}

/// Uniform surface samples of a primitive in its canonical pose, before any
/// rotation, noise or normalization.
pub fn sample_canonical(kind: ShapeKind, params: &[f64], n: usize, rng: &mut impl Rng) -> Vec<Point3<f64>> {
    let mut pts = Vec::with_capacity(n);
    match kind {
        ShapeKind::Sphere => {
            // Antipodal pairs (plus one zero-sum triple when n is odd) keep
            // the centroid at the centre, so normalization preserves radii.
            let r = params[0];
            let mut remaining = n;
            if n % 2 == 1 && n >= 3 {
                let u = unit_vector(rng);
                let helper = if u.x.abs() < 0.9 { Point3::new(1.0, 0.0, 0.0) } else { Point3::new(0.0, 1.0, 0.0) };
                let axis = u.cross(helper);
                for k in 0..3 {
                    let rot = Mat3::rotation_axis_angle(axis, k as f64 * TAU / 3.0);
                    pts.push(rot.mul_vec(u) * r);
                }
                remaining -= 3;
            }
            while remaining >= 2 {
                let u = unit_vector(rng) * r;
                pts.push(u);
                pts.push(-u);
                remaining -= 2;
            }
            if remaining == 1 {
                pts.push(unit_vector(rng) * r);
            }
        }
        ShapeKind::Cube => {
            let a = params[0];
            for _ in 0..n {
                let face = rng.random_range(0..6usize);
                let (u, v) = (rng.random_range(-a..a), rng.random_range(-a..a));
                let s = if face % 2 == 0 { a } else { -a };
                pts.push(match face / 2 {
                    0 => Point3::new(s, u, v),
                    1 => Point3::new(u, s, v),
                    _ => Point3::new(u, v, s),
                });
            }
        }
        ShapeKind::Cylinder => {
            let (r, h) = (params[0], params[1]);
            let weights = [TAU * r * h, PI * r * r, PI * r * r];
            for _ in 0..n {
                pts.push(match pick(rng, &weights) {
                    0 => {
                        let t = rng.random::<f64>() * TAU;
                        Point3::new(r * t.cos(), rng.random_range(-h / 2.0..h / 2.0), r * t.sin())
                    }
                    1 => disk_point(rng, r, h / 2.0),
                    _ => disk_point(rng, r, -h / 2.0),
                });
            }
        }
        ShapeKind::Cone => {
            let (r, h) = (params[0], params[1]);
            let slant = (r * r + h * h).sqrt();
            let weights = [PI * r * slant, PI * r * r];
            for _ in 0..n {
                pts.push(match pick(rng, &weights) {
                    0 => {
                        let s = rng.random::<f64>().sqrt();
                        let t = rng.random::<f64>() * TAU;
                        Point3::new(r * s * t.cos(), h * (1.0 - s), r * s * t.sin())
                    }
                    _ => disk_point(rng, r, 0.0),
                });
            }
        }
        ShapeKind::Torus => {
            let (big, small) = (params[0], params[1]);
            while pts.len() < n {
                let (theta, phi) = (rng.random::<f64>() * TAU, rng.random::<f64>() * TAU);
                // area element ∝ (R + r cos φ)
                if rng.random::<f64>() * (big + small) <= big + small * phi.cos() {
                    let ring = big + small * phi.cos();
                    pts.push(Point3::new(ring * theta.cos(), small * phi.sin(), ring * theta.sin()));
                }
            }
        }
        ShapeKind::Pyramid => {
            let (a, h) = (params[0], params[1]);
            let apex = Point3::new(0.0, h, 0.0);
            let c = [
                Point3::new(-a, 0.0, -a),
                Point3::new(a, 0.0, -a),
                Point3::new(a, 0.0, a),
                Point3::new(-a, 0.0, a),
            ];
            let tris = [
                [c[0], c[1], apex],
                [c[1], c[2], apex],
                [c[2], c[3], apex],
                [c[3], c[0], apex],
                [c[0], c[1], c[2]],
                [c[0], c[2], c[3]],
            ];
            for _ in 0..n {
                pts.push(sample_triangles(rng, &tris));
            }
        }
        ShapeKind::Ellipsoid => {
            let (a, b, c) = (params[0], params[1], params[2]);
            // The map u ↦ diag(a, b, c)·u scales the sphere's area element by
            // abc·|diag(1/a, 1/b, 1/c)·u|; accept in proportion to it.
            let g = |u: Point3<f64>| ((u.x / a).powi(2) + (u.y / b).powi(2) + (u.z / c).powi(2)).sqrt();
            let gmax = 1.0 / a.min(b).min(c);
            while pts.len() < n {
                let u = unit_vector(rng);
                if rng.random::<f64>() * gmax <= g(u) {
                    pts.push(Point3::new(a * u.x, b * u.y, c * u.z));
                }
            }
        }
        ShapeKind::Capsule => {
            let (r, h) = (params[0], params[1]);
            let weights = [TAU * r * h, 4.0 * PI * r * r];
            for _ in 0..n {
                pts.push(match pick(rng, &weights) {
                    0 => {
                        let t = rng.random::<f64>() * TAU;
                        Point3::new(r * t.cos(), rng.random_range(-h / 2.0..h / 2.0), r * t.sin())
                    }
                    _ => {
                        let u = unit_vector(rng);
                        let cy = if u.y >= 0.0 { h / 2.0 } else { -h / 2.0 };
                        Point3::new(r * u.x, cy + r * u.y, r * u.z)
                    }
                });
            }
        }
    }
    pts
}

/// Samples, poses, perturbs and normalizes one shape.
pub fn generate_synthetic<T: Real>(recipe: &SyntheticShapeRecipe) -> Result<PointCloud<T>> {
    recipe.validate()?;
    let mut r = rng::seeded(recipe.pose_seed);
    let angle = r.random::<f64>() * TAU;
    let rot = Mat3::rotation_y(angle);
    let sigma = recipe.noise_sigma;
    let pts: Vec<Point3<f64>> = sample_canonical(recipe.kind, &recipe.params, recipe.num_points, &mut r)
        .into_iter()
        .map(|p| {
            let q = rot.mul_vec(p);
            if sigma > 0.0 {
                let z: [f64; 3] = [r.sample(StandardNormal), r.sample(StandardNormal), r.sample(StandardNormal)];
                q + Point3::new(z[0], z[1], z[2]) * sigma
            } else {
                q
            }
        })
        .collect();
    let (normalized, _) = normalize_to_unit_sphere(&PointCloud::new(pts)?)?;
    Ok(normalized.cast())
}
