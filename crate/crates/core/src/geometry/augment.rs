use rand::seq::index;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::linalg::Mat3;
use super::point::PointCloud;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentOptions {
    /// Rotate about the y axis by an angle drawn uniformly from `[0, 2π)`.
    pub y_rotation: bool,
    /// Per-coordinate Gaussian noise, clipped to ±3σ.
    pub jitter_sigma: f64,
    /// Fraction of points removed, in `[0, 1)`.
    pub dropout_ratio: f64,
}

impl AugmentOptions {
    pub fn is_identity(&self) -> bool {
        !self.y_rotation && self.jitter_sigma == 0.0 && self.dropout_ratio == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_sigma >= 0.0 && self.jitter_sigma.is_finite()) {
            return Err(Error::InvalidOption(format!("jitter_sigma must be finite and >= 0, got {}", self.jitter_sigma)));
        }
        if !(0.0..1.0).contains(&self.dropout_ratio) {
            return Err(Error::InvalidOption(format!("dropout_ratio must be in [0, 1), got {}", self.dropout_ratio)));
        }
        Ok(())
    }
}

/// Rotates every point about the y axis by `angle` radians.
pub fn rotate_y<T: Real>(cloud: &PointCloud<T>, angle: T) -> Result<PointCloud<T>> {
    let r = Mat3::rotation_y(angle);
    cloud.map(|p| r.mul_vec(p))
}

/// Random rotation, jitter and point dropout, in that order. Deterministic
/// for a given seed.
pub fn augment<T: Real>(cloud: &PointCloud<T>, seed: u64, options: &AugmentOptions) -> Result<PointCloud<T>> {
    options.validate()?;
    if options.is_identity() {
        return Ok(cloud.clone());
    }
    let mut rng = rng::seeded(seed);
    let mut out = cloud.clone();

    if options.y_rotation {
        let angle: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        out = rotate_y(&out, T::lit(angle))?;
    }

    if options.jitter_sigma > 0.0 {
        let sigma = options.jitter_sigma;
        let mut noise = || {
            let z: f64 = rng.sample(StandardNormal);
            T::lit((z * sigma).clamp(-3.0 * sigma, 3.0 * sigma))
        };
        let pts = out
            .iter()
            .map(|&p| {
                let (dx, dy, dz) = (noise(), noise(), noise());
                super::Point3::new(p.x + dx, p.y + dy, p.z + dz)
            })
            .collect();
        out = PointCloud::new(pts)?;
    }

    if options.dropout_ratio > 0.0 {
        let n = out.len();
        let drop = (options.dropout_ratio * n as f64).floor() as usize;
        if drop >= n {
            return Err(Error::InvalidOption(format!("dropout of {drop} points leaves an empty cloud")));
        }
        let mut keep = vec![true; n];
        for i in index::sample(&mut rng, n, drop) {
            keep[i] = false;
        }
        let kept: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
        out = out.select(&kept)?;
    }
    Ok(out)
}
