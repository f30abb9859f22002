use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AugmentOptions, CUBIC_EXPONENTS, ORDER2_EXPONENTS};

/// Which monomials of `(x, y, z)` feed the first point-wise layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolynomialOrder {
    /// Raw coordinates only (the no-lift ablation).
    None,
    /// `x, y, z` and the six quadratic monomials: 9 entries.
    Second,
    /// `x, y, z` and the ten cubic monomials: 13 entries.
    Third,
    /// `x, y, z`, quadratic and cubic monomials: 19 entries.
    SecondAndThird,
    /// `x, y, z` followed by six learnable-order columns
    /// `exp(w · log(|p| + ε))`, initialised at the quadratic exponents.
    Learnable,
}

impl PolynomialOrder {
    /// Fixed exponent table for this order; for [`PolynomialOrder::Learnable`]
    /// only the raw-coordinate part.
    pub fn exponents(self) -> Vec<Vec<u8>> {
        let linear = || ORDER2_EXPONENTS[..3].iter().map(|e| e.to_vec());
        match self {
            PolynomialOrder::None | PolynomialOrder::Learnable => linear().collect(),
            PolynomialOrder::Second => ORDER2_EXPONENTS.iter().map(|e| e.to_vec()).collect(),
            PolynomialOrder::Third => linear().chain(CUBIC_EXPONENTS.iter().map(|e| e.to_vec())).collect(),
            PolynomialOrder::SecondAndThird => {
                ORDER2_EXPONENTS.iter().chain(CUBIC_EXPONENTS.iter()).map(|e| e.to_vec()).collect()
            }
        }
    }

    /// Width of the lifted per-point vector.
    pub fn lift_dim(self) -> usize {
        match self {
            PolynomialOrder::Learnable => 3 + LEARNABLE_COLUMNS,
            other => other.exponents().len(),
        }
    }
}

/// Learnable-order columns added after the raw coordinates.
pub const LEARNABLE_COLUMNS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Expected points per cloud; used for validation only, the network
    /// accepts any `n > k`.
    pub num_points: usize,
    pub num_classes: usize,
    pub k: usize,
    pub order: PolynomialOrder,
    pub use_tnet: bool,
    pub use_knn: bool,
    pub trunk_widths: Vec<usize>,
    pub head_widths: Vec<usize>,
    pub tnet_mlp_widths: Vec<usize>,
    pub tnet_fc_widths: Vec<usize>,
    pub dropout: f64,
    /// Multiplies every non-linear lift column by zero. An ablation switch:
    /// the network then computes exactly what a raw-coordinate network with
    /// the matching weights computes.
    pub zero_poly_entries: bool,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            num_points: 256,
            num_classes: 8,
            k: 20,
            order: PolynomialOrder::Second,
            use_tnet: true,
            use_knn: true,
            trunk_widths: vec![64, 64, 64, 128, 1024],
            head_widths: vec![512, 256],
            tnet_mlp_widths: vec![64, 128, 1024],
            tnet_fc_widths: vec![512, 256],
            dropout: 0.4,
            zero_poly_entries: false,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let widths = [
            ("trunk_widths", &self.trunk_widths),
            ("head_widths", &self.head_widths),
            ("tnet_mlp_widths", &self.tnet_mlp_widths),
            ("tnet_fc_widths", &self.tnet_fc_widths),
        ];
        for (field, w) in widths {
            if w.is_empty() || w.contains(&0) {
                return Err(Error::config(field, "widths must be non-empty and positive"));
            }
        }
        if self.num_classes < 2 {
            return Err(Error::config("num_classes", "need at least 2 classes"));
        }
        if self.use_knn && (self.k == 0 || self.k >= self.num_points) {
            return Err(Error::config("k", format!("need 1 <= k < num_points ({})", self.num_points)));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config("dropout", "must lie in [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// The rate is multiplied by `lr_decay` every `lr_step` epochs and never
    /// drops below `lr_floor`.
    pub lr_decay: f64,
    pub lr_step: usize,
    pub lr_floor: f64,
    pub augment: AugmentOptions,
    /// Evaluate on the test split every this many epochs (0: only after the
    /// last epoch).
    pub eval_every: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 25,
            batch_size: 32,
            lr: 0.01,
            lr_decay: 0.7,
            lr_step: 20,
            lr_floor: 1e-4,
            augment: AugmentOptions { y_rotation: false, jitter_sigma: 0.01, dropout_ratio: 0.0 },
            eval_every: 0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size", "must be positive"));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::config("lr", "must be finite and > 0"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::config("lr_decay", "must lie in (0, 1]"));
        }
        if self.lr_step == 0 {
            return Err(Error::config("lr_step", "must be positive"));
        }
        if !(self.lr_floor >= 0.0) {
            return Err(Error::config("lr_floor", "must be >= 0"));
        }
        self.augment.validate()
    }

    /// Learning rate in effect during `epoch` (0-based).
    pub fn lr_at(&self, epoch: usize) -> f64 {
        let decays = (epoch / self.lr_step) as i32;
        (self.lr * self.lr_decay.powi(decays)).max(self.lr_floor)
    }
}
