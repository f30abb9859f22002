use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Linear,
    SharedMlp,
    Relu,
    Sigmoid,
    MaxpoolOverAxis,
    SoftmaxXent,
    SquareUnit,
    HighOrderUnit { order: usize },
    LearnableOrderUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum Init {
    Zeros,
    Normal { std: f64 },
    /// `N(0, 2 / fan_in)`.
    HeNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub in_dim: usize,
    pub out_dim: usize,
    pub init: Init,
}

impl LayerSpec {
    pub fn linear(in_dim: usize, out_dim: usize, init: Init) -> Self {
        LayerSpec { kind: LayerKind::Linear, in_dim, out_dim, init }
    }

    /// Shape of the trainable weight, `None` for parameter-free layers.
    pub fn weight_shape(&self) -> Result<Option<[usize; 2]>> {
        if self.in_dim == 0 || self.out_dim == 0 {
            return Err(Error::InvalidCount(format!("layer dimensions must be positive: {self:?}")));
        }
        let d = self.in_dim;
        Ok(match self.kind {
            LayerKind::Linear | LayerKind::SharedMlp | LayerKind::LearnableOrderUnit => Some([d, self.out_dim]),
            LayerKind::SquareUnit => Some([2 * d, self.out_dim]),
            LayerKind::HighOrderUnit { order } => {
                let k = super::units::high_order_exponents(d, order)?.len();
                Some([k, self.out_dim])
            }
            LayerKind::Relu | LayerKind::Sigmoid | LayerKind::MaxpoolOverAxis | LayerKind::SoftmaxXent => None,
        })
    }

    fn fan_in(&self) -> usize {
        self.weight_shape().ok().flatten().map_or(self.in_dim, |s| s[0])
    }
}

/// Weight tensor for `spec`, drawn from the configured distribution.
/// Deterministic per seed.
pub fn init_weights<T: Real>(spec: &LayerSpec, seed: u64) -> Result<Tensor<T>> {
    let Some([rows, cols]) = spec.weight_shape()? else {
        return Err(Error::InvalidOption(format!("{:?} has no weights", spec.kind)));
    };
    let std = match spec.init {
        Init::Zeros => 0.0,
        Init::Normal { std } => std,
        Init::HeNormal => (2.0 / spec.fan_in() as f64).sqrt(),
    };
    if !(std >= 0.0 && std.is_finite()) {
        return Err(Error::InvalidOption(format!("init std must be finite and >= 0, got {std}")));
    }
    Ok(Tensor::matrix(rows, cols, normal_vec(rows * cols, std, seed))?)
}

/// `n` draws from `N(0, std²)`.
pub fn normal_vec<T: Real>(n: usize, std: f64, seed: u64) -> Vec<T> {
    if std == 0.0 {
        return vec![T::zero(); n];
    }
    let mut r = rng::seeded(seed);
    (0..n)
        .map(|_| {
            let z: f64 = r.sample(StandardNormal);
            T::lit(z * std)
        })
        .collect()
}
