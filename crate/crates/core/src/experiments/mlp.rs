use crate::error::{Error, Result};
use crate::nn::{normal_vec, Graph, NodeId, ParamStore, Tensor};

/// Fully connected ReLU network with a linear output layer.
///
/// Layer `i` owns `l{i}.w` (`in × out`) and `l{i}.b` (`1 × out`); every
/// entry, biases included, starts as an independent `N(0, std²)` draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    widths: Vec<usize>,
    pub params: ParamStore<f64>,
}

impl Mlp {
    /// `widths` runs from the input dimension to the output dimension.
    pub fn new(widths: &[usize], std: f64, seed: u64) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::InvalidCount(format!("network widths must be ≥ 2 positive entries, got {widths:?}")));
        }
        let mut params = ParamStore::new();
        for (i, pair) in widths.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let s = crate::rng::derive_seed(seed, i as u64);
            params.insert(format!("l{i}.w"), Tensor::matrix(a, b, normal_vec(a * b, std, s))?);
            params.insert(format!("l{i}.b"), Tensor::matrix(1, b, normal_vec(b, std, crate::rng::derive_seed(s, 1)))?);
        }
        Ok(Mlp { widths: widths.to_vec(), params })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// Output node for the row batch `x`; parameters enter as named leaves.
    pub fn forward(&self, g: &mut Graph<f64>, x: NodeId) -> Result<NodeId> {
        let layers = self.widths.len() - 1;
        let mut h = x;
        for i in 0..layers {
            let w = g.param(&format!("l{i}.w"), self.params.get(&format!("l{i}.w"))?.clone());
            let b = g.param(&format!("l{i}.b"), self.params.get(&format!("l{i}.b"))?.clone());
            h = g.dense(h, w, b, i + 1 < layers)?;
        }
        Ok(h)
    }

    /// Outputs for a batch of input rows, without building gradients.
    pub fn predict(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let d = self.widths[0];
        let mut g = Graph::new();
        let x = g.constant(Tensor::matrix(inputs.len() / d, d, inputs.to_vec())?);
        let y = self.forward(&mut g, x)?;
        Ok(g.value(y).data().to_vec())
    }
}
