//! The classifier: optional spatial transformer, polynomial lift with kNN
//! edge features, a shared point-wise trunk, max pooling and an FC head.
//!
//! A batch of `B` clouds with `n` points each is processed as one
//! `(B·n)×3` matrix; every point-wise layer is a single matrix product and
//! pooling runs over consecutive groups of rows.

use std::collections::HashMap;

use rand::Rng as _;

use super::config::{ModelConfig, PolynomialOrder, LEARNABLE_COLUMNS};
use crate::error::{Error, Result};
use crate::geometry::{knn_indices, KnnGraph, Mat3, PointCloud};
use crate::nn::{init_weights, learnable_order_node, Graph, Init, LayerSpec, NodeId, ParamStore, Tensor, LEARNABLE_ORDER_EPS};
use crate::rng;
use crate::scalar::Real;

const IDENTITY_3X3: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];

/// Forward mode: evaluation, or training with head dropout drawn from a seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pass {
    Eval,
    Train { dropout_seed: u64 },
}

/// Node handles of one forward pass.
#[derive(Debug, Clone, Copy)]
pub struct Forward {
    /// `B×C` class scores.
    pub logits: NodeId,
    /// `B×9` row-major transformer matrices, when the transformer is on.
    pub transform: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentNet<T> {
    config: ModelConfig,
    params: ParamStore<T>,
}

/// `(name, in, out, init)` of every dense layer, in parameter order.
fn layer_plan(c: &ModelConfig) -> Vec<(String, usize, usize, Init)> {
    let mut plan = Vec::new();
    if c.use_tnet {
        let mut prev = 3;
        for (i, &w) in c.tnet_mlp_widths.iter().enumerate() {
            plan.push((format!("tnet.mlp{i}"), prev, w, Init::HeNormal));
            prev = w;
        }
        for (i, &w) in c.tnet_fc_widths.iter().enumerate() {
            plan.push((format!("tnet.fc{i}"), prev, w, Init::HeNormal));
            prev = w;
        }
        plan.push(("tnet.out".into(), prev, 9, Init::Zeros));
    }
    let first_in = c.order.lift_dim() + if c.use_knn { 3 } else { 0 };
    let mut prev = first_in;
    for (i, &w) in c.trunk_widths.iter().enumerate() {
        plan.push((format!("trunk{i}"), prev, w, Init::HeNormal));
        prev = w;
    }
    for (i, &w) in c.head_widths.iter().enumerate() {
        plan.push((format!("head{i}"), prev, w, Init::HeNormal));
        prev = w;
    }
    plan.push(("out".into(), prev, c.num_classes, Init::HeNormal));
    plan
}

/// Learnable-order kernel initialised so its columns compute
/// `|x|², |y|², |z|², |x||y|, |x||z|, |y||z|` (up to ε).
fn learnable_lift_init<T: Real>() -> Tensor<T> {
    let exps = &crate::geometry::ORDER2_EXPONENTS[3..];
    let mut data = vec![T::zero(); 3 * LEARNABLE_COLUMNS];
    for (j, e) in exps.iter().enumerate() {
        for i in 0..3 {
            data[i * LEARNABLE_COLUMNS + j] = T::lit(e[i] as f64);
        }
    }
    Tensor::matrix(3, LEARNABLE_COLUMNS, data).expect("static shape")
}

/// Pre-MLP input of the second-order layer: for every point `i` and
/// neighbor slot `j`, the row `[lift(pᵢ), p_{nᵢⱼ} − pᵢ]`. `neighbors` holds
/// `k` global row indices per point.
pub fn edge_rows<T: Real>(
    g: &mut Graph<T>,
    points: NodeId,
    lifted: NodeId,
    neighbors: &[usize],
    k: usize,
) -> Result<NodeId> {
    let rows = g.value(points).rows();
    if g.value(lifted).rows() != rows || k == 0 || neighbors.len() != rows * k {
        return Err(Error::shape(
            "second_order_layer",
            format!("{} neighbor indices for {rows} points with k = {k}", neighbors.len()),
        ));
    }
    let centers: Vec<usize> = (0..rows).flat_map(|i| std::iter::repeat_n(i, k)).collect();
    let tiled = g.gather_rows(lifted, centers.clone())?;
    let nb = g.gather_rows(points, neighbors.to_vec())?;
    let ct = g.gather_rows(points, centers)?;
    let edge = g.sub(nb, ct)?;
    g.concat_cols(&[tiled, edge])
}

/// Second-order layer input for one cloud and a precomputed graph, as an
/// `(n·k)×(d+3)` matrix (`d` = lift width). Fixed-table orders only.
pub fn second_order_input<T: Real>(
    cloud: &PointCloud<T>,
    knn: &KnnGraph<T>,
    order: PolynomialOrder,
) -> Result<Tensor<T>> {
    if knn.num_points() != cloud.len() {
        return Err(Error::shape(
            "second_order_layer",
            format!("kNN graph over {} points for a cloud of {}", knn.num_points(), cloud.len()),
        ));
    }
    if order == PolynomialOrder::Learnable {
        return Err(Error::InvalidOption("the learnable lift needs model parameters".into()));
    }
    let mut g = Graph::new();
    let x = g.constant(Tensor::matrix(cloud.len(), 3, cloud.to_flat())?);
    let lifted = g.monomials(x, order.exponents())?;
    let rows = edge_rows(&mut g, x, lifted, knn.flat_neighbors(), knn.k())?;
    Ok(g.value(rows).clone())
}

impl<T: Real> MomentNet<T> {
    /// Fresh network: He-normal weights, zero biases, a zero final
    /// transformer layer (so the transformer starts as the identity).
    pub fn new(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let mut params = ParamStore::new();
        if config.order == PolynomialOrder::Learnable {
            params.insert("lift.w", learnable_lift_init());
        }
        for (idx, (name, fan_in, fan_out, init)) in layer_plan(&config).into_iter().enumerate() {
            let spec = LayerSpec::linear(fan_in, fan_out, init);
            params.insert(format!("{name}.w"), init_weights(&spec, rng::derive_seed(config.seed, idx as u64))?);
            params.insert(format!("{name}.b"), Tensor::zeros(&[1, fan_out]));
        }
        Ok(MomentNet { config, params })
    }

    /// Network from saved parameters; every expected tensor must be present
    /// with the right size.
    pub fn from_params(config: ModelConfig, params: ParamStore<T>) -> Result<Self> {
        let fresh = Self::new(config.clone())?;
        for (name, t) in fresh.params.iter() {
            let got = params.get(name)?;
            if got.shape() != t.shape() {
                return Err(Error::shape(
                    format!("parameter `{name}`"),
                    format!("expected {:?}, found {:?}", t.shape(), got.shape()),
                ));
            }
        }
        if params.len() != fresh.params.len() {
            return Err(Error::Format(format!(
                "checkpoint has {} tensors, the configuration expects {}",
                params.len(),
                fresh.params.len()
            )));
        }
        Ok(MomentNet { config, params })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamStore<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamStore<T> {
        &mut self.params
    }

    fn layer(
        &self,
        g: &mut Graph<T>,
        cache: &mut HashMap<String, (NodeId, NodeId)>,
        name: &str,
        x: NodeId,
        relu: bool,
    ) -> Result<NodeId> {
        let (w, b) = match cache.get(name) {
            Some(&wb) => wb,
            None => {
                let w = g.param(&format!("{name}.w"), self.params.get(&format!("{name}.w"))?.clone());
                let b = g.param(&format!("{name}.b"), self.params.get(&format!("{name}.b"))?.clone());
                cache.insert(name.to_string(), (w, b));
                (w, b)
            }
        };
        g.dense(x, w, b, relu)
    }

    fn dense(&self, g: &mut Graph<T>, cache: &mut HashMap<String, (NodeId, NodeId)>, name: &str, x: NodeId) -> Result<NodeId> {
        self.layer(g, cache, name, x, false)
    }

    fn dense_relu(&self, g: &mut Graph<T>, cache: &mut HashMap<String, (NodeId, NodeId)>, name: &str, x: NodeId) -> Result<NodeId> {
        self.layer(g, cache, name, x, true)
    }

    /// Input, transformer, lift and second-order layer (or the first
    /// point-wise layer without kNN): returns the `(B·n)×w₀` point features,
    /// the transformer matrices and `n`.
    fn front(
        &self,
        g: &mut Graph<T>,
        cache: &mut HashMap<String, (NodeId, NodeId)>,
        clouds: &[&PointCloud<T>],
    ) -> Result<(NodeId, Option<NodeId>, usize)> {
        let c = &self.config;
        let Some(first) = clouds.first() else {
            return Err(Error::EmptySplit("empty batch".into()));
        };
        let n = first.len();
        if clouds.iter().any(|cl| cl.len() != n) {
            return Err(Error::InvalidCount("all clouds in a batch must have the same point count".into()));
        }
        if c.use_knn && c.k >= n {
            return Err(Error::KTooLarge { k: c.k, n });
        }
        let b = clouds.len();
        let mut flat = Vec::with_capacity(b * n * 3);
        for cl in clouds {
            flat.extend(cl.to_flat());
        }
        let mut x = g.constant(Tensor::matrix(b * n, 3, flat)?);

        let mut transform = None;
        if c.use_tnet {
            let mut h = x;
            for i in 0..c.tnet_mlp_widths.len() {
                h = self.dense_relu(g, cache, &format!("tnet.mlp{i}"), h)?;
            }
            h = g.max_pool_rows(h, n)?;
            for i in 0..c.tnet_fc_widths.len() {
                h = self.dense_relu(g, cache, &format!("tnet.fc{i}"), h)?;
            }
            let residual = self.dense(g, cache, "tnet.out", h)?;
            let eye = g.constant(Tensor::row_vector(IDENTITY_3X3.iter().map(|&v| T::lit(v)).collect())?);
            let mats = g.add_bias(residual, eye)?;
            x = g.batched_transform(x, mats, n)?;
            transform = Some(mats);
        }

        let mut lifted = g.monomials(x, c.order.exponents())?;
        if c.order == PolynomialOrder::Learnable {
            let w = g.param("lift.w", self.params.get("lift.w")?.clone());
            let learned = learnable_order_node(g, x, w, T::lit(LEARNABLE_ORDER_EPS))?;
            lifted = g.concat_cols(&[lifted, learned])?;
        }
        if c.zero_poly_entries {
            let d = g.value(lifted).cols();
            let mask: Vec<T> = (0..b * n * d).map(|i| if i % d < 3 { T::one() } else { T::zero() }).collect();
            lifted = g.mul_const(lifted, mask)?;
        }

        let h = if c.use_knn {
            // Neighbors are found on the (transformed) coordinates and
            // treated as constants by the backward pass.
            let coords = g.value(x).data().to_vec();
            let mut neighbors = Vec::with_capacity(b * n * c.k);
            for (ci, chunk) in coords.chunks(n * 3).enumerate() {
                neighbors.extend(knn_indices(chunk, c.k)?.into_iter().map(|j| j + ci * n));
            }
            let rows = edge_rows(g, x, lifted, &neighbors, c.k)?;
            let e = self.dense_relu(g, cache, "trunk0", rows)?;
            g.max_pool_rows(e, c.k)?
        } else {
            self.dense_relu(g, cache, "trunk0", lifted)?
        };
        Ok((h, transform, n))
    }

    /// Builds the forward pass for a batch of equally sized clouds.
    pub fn forward(&self, g: &mut Graph<T>, clouds: &[&PointCloud<T>], pass: Pass) -> Result<Forward> {
        let c = &self.config;
        let mut cache = HashMap::new();
        let (mut h, transform, n) = self.front(g, &mut cache, clouds)?;
        for i in 1..c.trunk_widths.len() {
            h = self.dense_relu(g, &mut cache, &format!("trunk{i}"), h)?;
        }
        h = g.max_pool_rows(h, n)?;

        for i in 0..c.head_widths.len() {
            h = self.dense_relu(g, &mut cache, &format!("head{i}"), h)?;
            if let Pass::Train { dropout_seed } = pass {
                if c.dropout > 0.0 {
                    let keep = 1.0 - c.dropout;
                    let scale = T::lit(1.0 / keep);
                    let mut r = rng::seeded(rng::derive_seed(dropout_seed, i as u64));
                    let len = g.value(h).len();
                    let mask = (0..len).map(|_| if r.random::<f64>() < keep { scale } else { T::zero() }).collect();
                    h = g.mul_const(h, mask)?;
                }
            }
        }
        let logits = self.dense(g, &mut cache, "out", h)?;
        Ok(Forward { logits, transform })
    }

    /// Class scores, one row per cloud (evaluation mode).
    pub fn logits(&self, clouds: &[&PointCloud<T>]) -> Result<Vec<Vec<T>>> {
        let mut g = Graph::new();
        let f = self.forward(&mut g, clouds, Pass::Eval)?;
        let t = g.value(f.logits);
        Ok((0..t.rows()).map(|r| t.row(r).to_vec()).collect())
    }

    /// The transformer's 3×3 matrix for one cloud; the identity when the
    /// transformer is disabled.
    pub fn tnet_forward(&self, cloud: &PointCloud<T>) -> Result<Mat3<T>> {
        if !self.config.use_tnet {
            return Ok(Mat3::identity());
        }
        let mut g = Graph::new();
        let (_, mats, _) = self.front(&mut g, &mut HashMap::new(), &[cloud])?;
        let m = g.value(mats.expect("transformer enabled")).row(0);
        Ok(Mat3([[m[0], m[1], m[2]], [m[3], m[4], m[5]], [m[6], m[7], m[8]]]))
    }

    /// Output of the second-order layer after the neighbor max (or of the
    /// first point-wise layer without kNN): `n × trunk_widths[0]`.
    pub fn second_order_layer(&self, cloud: &PointCloud<T>) -> Result<Tensor<T>> {
        let mut g = Graph::new();
        let (h, _, _) = self.front(&mut g, &mut HashMap::new(), &[cloud])?;
        Ok(g.value(h).clone())
    }

    /// Mean cross-entropy loss node for a labelled batch.
    pub fn loss(&self, g: &mut Graph<T>, clouds: &[&PointCloud<T>], labels: &[usize], pass: Pass) -> Result<(NodeId, Forward)> {
        let f = self.forward(g, clouds, pass)?;
        let loss = g.softmax_cross_entropy(f.logits, labels)?;
        Ok((loss, f))
    }
}
