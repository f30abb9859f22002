use std::f64::consts::PI;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mlp::Mlp;
use crate::error::{Error, Result};
use crate::nn::{adam_step, sigmoid, AdamState, Graph, Tensor};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpiralConfig {
    pub per_class: usize,
    pub noise_sigma: f64,
    pub hidden: usize,
    /// Feed `(x, y, x², y², xy)` instead of `(x, y)`.
    pub lift: bool,
    pub init_std: f64,
    pub lr: f64,
    /// Full-batch Adam steps.
    pub steps: usize,
    /// Decision grid resolution per axis, over `[-grid_bound, grid_bound]²`.
    pub grid: usize,
    pub grid_bound: f64,
    pub seed: u64,
}

impl Default for SpiralConfig {
    fn default() -> Self {
        SpiralConfig {
            per_class: 500,
            noise_sigma: 0.025,
            hidden: 8,
            lift: true,
            init_std: 0.5,
            lr: 0.01,
            steps: 5000,
            grid: 200,
            grid_bound: 1.2,
            seed: 0,
        }
    }
}

impl SpiralConfig {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [("per_class", self.per_class), ("hidden", self.hidden), ("steps", self.steps), ("grid", self.grid)] {
            if v == 0 {
                return Err(Error::config(field, "must be positive"));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::config("noise_sigma", "must be finite and ≥ 0"));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::config("lr", "must be positive"));
        }
        if !(self.init_std > 0.0 && self.init_std.is_finite()) {
            return Err(Error::config("init_std", "must be positive"));
        }
        if !(self.grid_bound > 0.0 && self.grid_bound.is_finite()) {
            return Err(Error::config("grid_bound", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSet {
    pub points: Vec<[f64; 2]>,
    /// 0 or 1.
    pub labels: Vec<u8>,
}

/// Two interleaved spirals: class `c` draws `t ~ U[0.25, 3π]` and places the
/// point at radius `t / 3π`, angle `t + cπ`, plus isotropic Gaussian noise.
pub fn two_spirals(per_class: usize, noise_sigma: f64, seed: u64) -> SpiralSet {
    let mut r = rng::seeded(seed);
    let mut points = Vec::with_capacity(2 * per_class);
    let mut labels = Vec::with_capacity(2 * per_class);
    for c in 0..2u8 {
        for _ in 0..per_class {
            let t = r.random_range(0.25..=3.0 * PI);
            let (rad, theta) = (t / (3.0 * PI), t + f64::from(c) * PI);
            let nx: f64 = r.sample(StandardNormal);
            let ny: f64 = r.sample(StandardNormal);
            points.push([rad * theta.cos() + noise_sigma * nx, rad * theta.sin() + noise_sigma * ny]);
            labels.push(c);
        }
    }
    SpiralSet { points, labels }
}

pub fn spiral_features(p: [f64; 2], lift: bool) -> Vec<f64> {
    let [x, y] = p;
    if lift {
        vec![x, y, x * x, y * y, x * y]
    } else {
        vec![x, y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    /// Predicted probability of class 1.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralReport {
    pub lift: bool,
    pub hidden: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub final_loss: f64,
    pub steps: usize,
    /// Row-major, `y` outer and `x` inner, both ascending.
    #[serde(skip)]
    pub grid: Vec<GridCell>,
}

/// Trains a one-hidden-layer ReLU network with a sigmoid output on the
/// spirals (binary cross-entropy, full-batch Adam) and reports training
/// accuracy plus the decision surface on a regular grid.
pub fn toy_spiral(cfg: &SpiralConfig) -> Result<SpiralReport> {
    cfg.validate()?;
    let data = two_spirals(cfg.per_class, cfg.noise_sigma, rng::derive_seed(cfg.seed, 0x5917));
    let d = if cfg.lift { 5 } else { 2 };
    let feats: Vec<f64> = data.points.iter().flat_map(|&p| spiral_features(p, cfg.lift)).collect();
    let input = Tensor::matrix(data.points.len(), d, feats.clone())?;
    let targets: Vec<f64> = data.labels.iter().map(|&l| f64::from(l)).collect();
    let mut net = Mlp::new(&[d, cfg.hidden, 1], cfg.init_std, rng::derive_seed(cfg.seed, 0x11e7))?;
    let mut adam = AdamState::new(cfg.lr);

    let mut final_loss = f64::NAN;
    for _ in 0..cfg.steps {
        let mut g = Graph::new();
        let x = g.constant(input.clone());
        let z = net.forward(&mut g, x)?;
        let loss = g.bce_with_logits(z, targets.clone())?;
        final_loss = g.value(loss).item();
        let grads = g.backward(loss)?.param_grads(|name| net.params.get(name).map_or(0, |p| p.len()));
        adam_step(&mut net.params, &grads, &mut adam)?;
    }
    if !final_loss.is_finite() {
        return Err(Error::NonFinite(cfg.steps));
    }

    let logits = net.predict(&feats)?;
    let correct = logits.iter().zip(&data.labels).filter(|(&z, &l)| (z > 0.0) == (l == 1)).count();

    let axis: Vec<f64> = (0..cfg.grid)
        .map(|i| if cfg.grid == 1 { 0.0 } else { -cfg.grid_bound + 2.0 * cfg.grid_bound * i as f64 / (cfg.grid - 1) as f64 })
        .collect();
    let cells: Vec<[f64; 2]> = axis.iter().flat_map(|&y| axis.iter().map(move |&x| [x, y])).collect();
    let grid_feats: Vec<f64> = cells.iter().flat_map(|&p| spiral_features(p, cfg.lift)).collect();
    let grid = net
        .predict(&grid_feats)?
        .into_iter()
        .zip(&cells)
        .map(|(z, &[x, y])| GridCell { x, y, p: sigmoid(z) })
        .collect();

    Ok(SpiralReport {
        lift: cfg.lift,
        hidden: cfg.hidden,
        seed: cfg.seed,
        accuracy: correct as f64 / data.labels.len() as f64,
        final_loss,
        steps: cfg.steps,
        grid,
    })
}
