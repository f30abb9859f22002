//! Single-neuron units: the first-order perceptron and its polynomial
//! extensions (high-order, square, and learnable-order units).
//!
//! The plain functions evaluate a unit directly with sequential sums. The
//! `*_node` builders express the same unit on a [`Graph`] so it can be
//! differentiated.

use super::graph::{sigmoid, Graph, NodeId};
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::geometry::eval_monomial;
use crate::scalar::Real;

/// Default stabilizer inside `log(|x| + ε)`.
pub const LEARNABLE_ORDER_EPS: f64 = 1e-7;

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::shape(what, format!("expected {want} weights, got {got}")));
    }
    Ok(())
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `σ(Σⱼ wⱼηⱼ)`.
pub fn perceptron_unit<T: Real>(eta: &[T], w: &[T]) -> Result<T> {
    check_len("perceptron_unit", w.len(), eta.len())?;
    Ok(sigmoid(dot(eta, w)))
}

/// Exponent vectors of all monomials of degree `1..=order` in `dim`
/// variables, with each unordered index tuple listed once (`i ≤ j ≤ k`).
/// Degree-1 terms come first, then degree 2, then degree 3.
pub fn high_order_exponents(dim: usize, order: usize) -> Result<Vec<Vec<u8>>> {
    if !(2..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let unit = |idx: &[usize]| {
        let mut e = vec![0u8; dim];
        for &i in idx {
            e[i] += 1;
        }
        e
    };
    let mut table: Vec<Vec<u8>> = (0..dim).map(|i| unit(&[i])).collect();
    for i in 0..dim {
        for j in i..dim {
            table.push(unit(&[i, j]));
        }
    }
    if order == 3 {
        for i in 0..dim {
            for j in i..dim {
                for k in j..dim {
                    table.push(unit(&[i, j, k]));
                }
            }
        }
    }
    Ok(table)
}

/// Weights of a high-order unit. The pair and triple tensors are symmetric
/// and stored upper-triangular only, in the order of
/// [`high_order_exponents`].
#[derive(Debug, Clone, PartialEq)]
pub struct HighOrderWeights<T> {
    pub first: Vec<T>,
    pub second: Vec<T>,
    pub third: Option<Vec<T>>,
}

impl<T: Real> HighOrderWeights<T> {
    pub fn zeros(dim: usize, order: usize) -> Result<Self> {
        let pairs = dim * (dim + 1) / 2;
        let triples = dim * (dim + 1) * (dim + 2) / 6;
        match order {
            2 => Ok(HighOrderWeights { first: vec![T::zero(); dim], second: vec![T::zero(); pairs], third: None }),
            3 => Ok(HighOrderWeights {
                first: vec![T::zero(); dim],
                second: vec![T::zero(); pairs],
                third: Some(vec![T::zero(); triples]),
            }),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }

    pub fn order(&self) -> usize {
        if self.third.is_some() {
            3
        } else {
            2
        }
    }

    /// All weights in [`high_order_exponents`] order.
    pub fn flatten(&self) -> Vec<T> {
        let mut v = self.first.clone();
        v.extend_from_slice(&self.second);
        if let Some(t) = &self.third {
            v.extend_from_slice(t);
        }
        v
    }

    /// Sets the weight of the upper-triangular pair `(i, j)`, `i ≤ j`.
    pub fn set_pair(&mut self, i: usize, j: usize, w: T) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let d = self.first.len();
        // Row i of the upper triangle starts after rows 0..i, which hold
        // d + (d-1) + … + (d-i+1) entries.
        let start: usize = (0..i).map(|r| d - r).sum();
        self.second[start + (j - i)] = w;
    }
}

/// `σ(Σᵢwᵢηᵢ + Σ_{i≤j} wᵢⱼηᵢηⱼ [+ Σ_{i≤j≤k} wᵢⱼₖηᵢηⱼηₖ])`.
pub fn high_order_unit<T: Real>(eta: &[T], w: &HighOrderWeights<T>) -> Result<T> {
    let d = eta.len();
    let table = high_order_exponents(d, w.order())?;
    check_len("high_order_unit", w.first.len(), d)?;
    check_len("high_order_unit", w.second.len(), d * (d + 1) / 2)?;
    if let Some(t) = &w.third {
        check_len("high_order_unit", t.len(), d * (d + 1) * (d + 2) / 6)?;
    }
    let mut acc = dot(eta, &w.first);
    for (e, &wk) in table[d..].iter().zip(w.second.iter().chain(w.third.iter().flatten())) {
        acc = acc + wk * eval_monomial(e, eta);
    }
    Ok(sigmoid(acc))
}

/// `σ(Σᵢ w¹ᵢηᵢ + Σⱼ w²ⱼηⱼ²)`.
pub fn square_unit<T: Real>(eta: &[T], w1: &[T], w2: &[T]) -> Result<T> {
    check_len("square_unit", w1.len(), eta.len())?;
    check_len("square_unit", w2.len(), eta.len())?;
    let squares: Vec<T> = eta.iter().map(|&x| x * x).collect();
    Ok(sigmoid(dot(eta, w1) + dot(&squares, w2)))
}

/// `exp(w · log(|x| + ε))` with `w` a row-major `len(x) × out` kernel.
pub fn learnable_order_unit<T: Real>(x: &[T], w: &[T], out: usize, eps: T) -> Result<Vec<T>> {
    check_len("learnable_order_unit", w.len(), x.len() * out)?;
    if eps <= T::zero() {
        return Err(Error::InvalidOption("learnable-order epsilon must be > 0".into()));
    }
    let logs: Vec<T> = x.iter().map(|&v| (v.abs() + eps).ln()).collect();
    Ok((0..out)
        .map(|j| logs.iter().enumerate().fold(T::zero(), |acc, (i, &l)| acc + l * w[i * out + j]).exp())
        .collect())
}

/// Graph form of [`high_order_unit`] on a `b×d` batch `eta` with a flat
/// weight column `w` (`K×1`, [`high_order_exponents`] order).
pub fn high_order_node<T: Real>(g: &mut Graph<T>, eta: NodeId, w: NodeId, order: usize) -> Result<NodeId> {
    let d = g.value(eta).cols();
    let feats = g.monomials(eta, high_order_exponents(d, order)?)?;
    let z = g.matmul(feats, w)?;
    g.sigmoid(z)
}

/// Graph form of [`square_unit`]; `w` is the `2d×1` column `[w¹; w²]`.
pub fn square_node<T: Real>(g: &mut Graph<T>, eta: NodeId, w: NodeId) -> Result<NodeId> {
    let d = g.value(eta).cols();
    let mut table: Vec<Vec<u8>> = Vec::with_capacity(2 * d);
    for power in [1u8, 2] {
        for i in 0..d {
            let mut e = vec![0u8; d];
            e[i] = power;
            table.push(e);
        }
    }
    let feats = g.monomials(eta, table)?;
    let z = g.matmul(feats, w)?;
    g.sigmoid(z)
}

/// Graph form of [`learnable_order_unit`] on a batch `x` (`b×d`) with
/// kernel `w` (`d×out`).
pub fn learnable_order_node<T: Real>(g: &mut Graph<T>, x: NodeId, w: NodeId, eps: T) -> Result<NodeId> {
    let a = g.abs(x)?;
    let shifted = g.add_scalar(a, eps)?;
    let logs = g.log(shifted)?;
    let z = g.matmul(logs, w)?;
    g.exp(z)
}

/// Column tensor from a weight slice, for the graph builders above.
pub fn column<T: Real>(w: &[T]) -> Result<Tensor<T>> {
    Tensor::matrix(w.len(), 1, w.to_vec())
}
