use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::mlp::Mlp;
use crate::error::{Error, Result};
use crate::nn::{adam_step, AdamState, Graph, Tensor};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToyX2Config {
    /// Hidden-layer counts to try.
    pub depths: Vec<usize>,
    /// Independent initialisations per depth.
    pub runs: usize,
    /// Uniform samples of `[0, 1]`.
    pub samples: usize,
    /// ReLU units per hidden layer.
    pub width: usize,
    /// Standard deviation of the normal initialisation.
    pub init_std: f64,
    pub lr: f64,
    pub max_steps: usize,
    /// Training stops once the best L∞ error improves by less than
    /// `min_improvement` over `window` consecutive steps.
    pub window: usize,
    pub min_improvement: f64,
    pub seed: u64,
}

impl Default for ToyX2Config {
    fn default() -> Self {
        ToyX2Config {
            depths: (1..=6).collect(),
            runs: 5,
            samples: 1000,
            width: 4,
            init_std: 0.5,
            lr: 0.01,
            max_steps: 20_000,
            window: 1000,
            min_improvement: 1e-5,
            seed: 0,
        }
    }
}

impl ToyX2Config {
    pub fn validate(&self) -> Result<()> {
        if self.depths.is_empty() || self.depths.contains(&0) {
            return Err(Error::config("depths", "need at least one depth, all ≥ 1"));
        }
        for (field, v) in [("runs", self.runs), ("samples", self.samples), ("width", self.width), ("window", self.window)] {
            if v == 0 {
                return Err(Error::config(field, "must be positive"));
            }
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::config("lr", "must be positive"));
        }
        if !(self.init_std > 0.0 && self.init_std.is_finite()) {
            return Err(Error::config("init_std", "must be positive"));
        }
        Ok(())
    }

    fn inputs(&self) -> Vec<f64> {
        let mut r = rng::seeded(rng::derive_seed(self.seed, 0x7832));
        (0..self.samples).map(|_| r.random_range(0.0..=1.0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct X2Run {
    pub depth: usize,
    pub run: usize,
    /// Lowest maximum absolute error over the samples seen during training.
    pub linf: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthSummary {
    pub depth: usize,
    pub best: f64,
    pub median: f64,
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyX2Report {
    pub runs: Vec<X2Run>,
    pub summary: Vec<DepthSummary>,
}

impl ToyX2Report {
    pub fn depth(&self, depth: usize) -> Option<&DepthSummary> {
        self.summary.iter().find(|s| s.depth == depth)
    }
}

/// Trains one `depth`-hidden-layer network on `y = x²` by full-batch Adam on
/// the mean squared error.
pub fn fit_x2(cfg: &ToyX2Config, depth: usize, run: usize) -> Result<X2Run> {
    cfg.validate()?;
    let xs = cfg.inputs();
    let targets: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let mut widths = vec![1];
    widths.extend(std::iter::repeat_n(cfg.width, depth));
    widths.push(1);
    let seed = rng::derive_seed(cfg.seed, ((depth as u64) << 32) | run as u64);
    let mut net = Mlp::new(&widths, cfg.init_std, seed)?;
    let mut adam = AdamState::new(cfg.lr);
    let input = Tensor::matrix(xs.len(), 1, xs)?;
    let target = Tensor::matrix(targets.len(), 1, targets)?;

    let mut best = f64::INFINITY;
    let mut checkpoint = f64::INFINITY;
    let mut steps = 0;
    while steps < cfg.max_steps {
        let mut g = Graph::new();
        let x = g.constant(input.clone());
        let t = g.constant(target.clone());
        let y = net.forward(&mut g, x)?;
        let err = g.sub(y, t)?;
        let linf = g.value(err).data().iter().fold(0.0f64, |m, e| m.max(e.abs()));
        best = best.min(linf);
        let sq = g.mul(err, err)?;
        let loss = g.mean(sq)?;
        let grads = g.backward(loss)?.param_grads(|name| net.params.get(name).map_or(0, |p| p.len()));
        adam_step(&mut net.params, &grads, &mut adam)?;
        steps += 1;
        if steps % cfg.window == 0 {
            if checkpoint - best < cfg.min_improvement {
                break;
            }
            checkpoint = best;
        }
    }
    if !best.is_finite() {
        return Err(Error::NonFinite(steps));
    }
    Ok(X2Run { depth, run, linf: best, steps })
}

/// Every depth × run combination, plus per-depth best/median/worst.
pub fn toy_x2(cfg: &ToyX2Config) -> Result<ToyX2Report> {
    cfg.validate()?;
    let mut runs = Vec::with_capacity(cfg.depths.len() * cfg.runs);
    let mut summary = Vec::with_capacity(cfg.depths.len());
    for &depth in &cfg.depths {
        let mut errs = Vec::with_capacity(cfg.runs);
        for run in 0..cfg.runs {
            let r = fit_x2(cfg, depth, run)?;
            errs.push(r.linf);
            runs.push(r);
        }
        errs.sort_by(f64::total_cmp);
        let mid = errs.len() / 2;
        let median = if errs.len() % 2 == 1 { errs[mid] } else { 0.5 * (errs[mid - 1] + errs[mid]) };
        summary.push(DepthSummary { depth, best: errs[0], median, worst: errs[errs.len() - 1] });
    }
    Ok(ToyX2Report { runs, summary })
}
