//! Operation-level reverse-mode automatic differentiation.
//!
//! A [`Graph`] is built fresh for every forward pass. Nodes are appended in
//! evaluation order, so the node list is already a topological order and
//! [`Graph::backward`] simply walks it in reverse. Tensors are treated as
//! matrices (`rows × cols`, leading dimensions collapsed) by every op.

use indexmap::IndexMap;

use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::geometry::{eval_monomial, monomial_partial};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug)]
enum Op<T> {
    Leaf,
    MatMul(NodeId, NodeId),
    Dense { x: NodeId, w: NodeId, b: NodeId, relu: bool },
    AddBias(NodeId, NodeId),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    MulConst(NodeId, Vec<T>),
    AddScalar(NodeId),
    Scale(NodeId, T),
    Relu(NodeId),
    Sigmoid(NodeId),
    Exp(NodeId),
    Log(NodeId),
    Abs(NodeId),
    Sum(NodeId),
    Mean(NodeId),
    MaxAbs { input: NodeId, argmax: usize },
    ConcatCols(Vec<NodeId>),
    GatherRows { input: NodeId, index: Vec<usize> },
    MaxPoolRows { input: NodeId, argmax: Vec<usize> },
    Monomials { input: NodeId, exponents: Vec<Vec<u8>> },
    BatchedTransform { points: NodeId, mats: NodeId, group: usize },
    SoftmaxXent { logits: NodeId, labels: Vec<usize>, probs: Vec<T> },
    BceWithLogits { logits: NodeId, targets: Vec<T> },
}

impl<T> Op<T> {
    fn name(&self) -> &'static str {
        match self {
            Op::Leaf => "leaf",
            Op::MatMul(..) => "matmul",
            Op::Dense { .. } => "dense",
            Op::AddBias(..) => "add_bias",
            Op::Add(..) => "add",
            Op::Sub(..) => "sub",
            Op::Mul(..) => "mul",
            Op::MulConst(..) => "mul_const",
            Op::AddScalar(..) => "add_scalar",
            Op::Scale(..) => "scale",
            Op::Relu(..) => "relu",
            Op::Sigmoid(..) => "sigmoid",
            Op::Exp(..) => "exp",
            Op::Log(..) => "log",
            Op::Abs(..) => "abs",
            Op::Sum(..) => "sum",
            Op::Mean(..) => "mean",
            Op::MaxAbs { .. } => "max_abs",
            Op::ConcatCols(..) => "concat_cols",
            Op::GatherRows { .. } => "gather_rows",
            Op::MaxPoolRows { .. } => "max_pool_rows",
            Op::Monomials { .. } => "monomials",
            Op::BatchedTransform { .. } => "batched_transform",
            Op::SoftmaxXent { .. } => "softmax_xent",
            Op::BceWithLogits { .. } => "bce_with_logits",
        }
    }
}

#[derive(Debug)]
struct Node<T> {
    value: Tensor<T>,
    op: Op<T>,
    requires_grad: bool,
    label: Option<String>,
}

/// Computation graph for a single forward/backward pass.
#[derive(Debug, Default)]
pub struct Graph<T> {
    nodes: Vec<Node<T>>,
    params: Vec<(String, NodeId)>,
}

/// Gradients produced by [`Graph::backward`], indexed by node.
#[derive(Debug)]
pub struct Gradients<T> {
    grads: Vec<Option<Vec<T>>>,
    params: Vec<(String, NodeId)>,
}

impl<T: Real> Gradients<T> {
    pub fn get(&self, id: NodeId) -> Option<&[T]> {
        self.grads.get(id.0).and_then(|g| g.as_deref())
    }

    /// Gradients of every parameter registered with [`Graph::param`].
    /// Parameters the loss does not depend on get zeros.
    pub fn param_grads(mut self, shapes: impl Fn(&str) -> usize) -> IndexMap<String, Vec<T>> {
        let mut out = IndexMap::new();
        for (name, id) in std::mem::take(&mut self.params) {
            let g = self.grads[id.0].take().unwrap_or_else(|| vec![T::zero(); shapes(&name)]);
            out.insert(name, g);
        }
        out
    }
}

fn accumulate<T: Real>(slot: &mut Option<Vec<T>>, len: usize, f: impl FnOnce(&mut [T])) {
    let buf = slot.get_or_insert_with(|| vec![T::zero(); len]);
    f(buf);
}

impl<T: Real> Graph<T> {
    pub fn new() -> Self {
        Graph { nodes: Vec::new(), params: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Tensor<T> {
        &self.nodes[id.0].value
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, requires_grad: bool) -> NodeId {
        self.nodes.push(Node { value, op, requires_grad, label: None });
        NodeId(self.nodes.len() - 1)
    }

    fn rg(&self, id: NodeId) -> bool {
        self.nodes[id.0].requires_grad
    }

    fn describe(&self, id: NodeId) -> String {
        let n = &self.nodes[id.0];
        match &n.label {
            Some(l) => format!("#{} `{}` {:?}", id.0, l, n.value.shape()),
            None => format!("#{} {} {:?}", id.0, n.op.name(), n.value.shape()),
        }
    }

    fn mismatch(&self, op: &str, ids: &[NodeId], detail: &str) -> Error {
        let operands: Vec<String> = ids.iter().map(|&i| self.describe(i)).collect();
        Error::shape(format!("{op}({})", operands.join(", ")), detail)
    }

    /// Input that does not receive gradients.
    pub fn constant(&mut self, t: Tensor<T>) -> NodeId {
        self.push(t, Op::Leaf, false)
    }

    /// Input that receives gradients.
    pub fn variable(&mut self, t: Tensor<T>) -> NodeId {
        self.push(t, Op::Leaf, true)
    }

    /// Named trainable parameter; its gradient is reported by
    /// [`Gradients::param_grads`].
    pub fn param(&mut self, name: &str, t: Tensor<T>) -> NodeId {
        let id = self.variable(t);
        self.nodes[id.0].label = Some(name.to_string());
        self.params.push((name.to_string(), id));
        id
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (ta, tb) = (self.value(a), self.value(b));
        let (m, k, k2, n) = (ta.rows(), ta.cols(), tb.rows(), tb.cols());
        if k != k2 {
            return Err(self.mismatch("matmul", &[a, b], &format!("inner dimensions {k} and {k2} differ")));
        }
        let mut out = vec![T::zero(); m * n];
        T::gemm(m, k, n, ta.data(), (k, 1), tb.data(), (n, 1), &mut out, (n, 1), false);
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(Tensor::matrix(m, n, out)?, Op::MatMul(a, b), rg))
    }

    /// `x·W + b`, optionally followed by ReLU, as a single node. Equivalent
    /// to `linear` (+ `relu`) but with one output buffer instead of three.
    pub fn dense(&mut self, x: NodeId, w: NodeId, b: NodeId, relu: bool) -> Result<NodeId> {
        let (tx, tw, tb) = (self.value(x), self.value(w), self.value(b));
        let (m, k, k2, n) = (tx.rows(), tx.cols(), tw.rows(), tw.cols());
        if k != k2 || tb.len() != n {
            return Err(self.mismatch(
                "dense",
                &[x, w, b],
                &format!("input width {k}, weight {k2}×{n}, bias of length {}", tb.len()),
            ));
        }
        let mut out = Vec::with_capacity(m * n);
        for _ in 0..m {
            out.extend_from_slice(tb.data());
        }
        T::gemm(m, k, n, tx.data(), (k, 1), tw.data(), (n, 1), &mut out, (n, 1), true);
        if relu {
            for v in out.iter_mut() {
                if *v <= T::zero() {
                    *v = T::zero();
                }
            }
        }
        let rg = self.rg(x) || self.rg(w) || self.rg(b);
        Ok(self.push(Tensor::matrix(m, n, out)?, Op::Dense { x, w, b, relu }, rg))
    }

    /// `a + b` with `b` (length `cols(a)`) broadcast across rows.
    pub fn add_bias(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let (ta, tb) = (self.value(a), self.value(b));
        let c = ta.cols();
        if tb.len() != c {
            return Err(self.mismatch("add_bias", &[a, b], &format!("bias of length {} for {c} columns", tb.len())));
        }
        let bias = tb.data();
        let mut out = ta.data().to_vec();
        for row in out.chunks_mut(c) {
            for (v, &bv) in row.iter_mut().zip(bias) {
                *v += bv;
            }
        }
        let shape = ta.shape().to_vec();
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(Tensor::new(shape, out)?, Op::AddBias(a, b), rg))
    }

    fn zip_with(&mut self, a: NodeId, b: NodeId, name: &str, f: impl Fn(T, T) -> T) -> Result<Tensor<T>> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() {
            return Err(self.mismatch(name, &[a, b], "operand shapes differ"));
        }
        let out = ta.data().iter().zip(tb.data()).map(|(&x, &y)| f(x, y)).collect();
        Tensor::new(ta.shape().to_vec(), out)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let t = self.zip_with(a, b, "add", |x, y| x + y)?;
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(t, Op::Add(a, b), rg))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let t = self.zip_with(a, b, "sub", |x, y| x - y)?;
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(t, Op::Sub(a, b), rg))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let t = self.zip_with(a, b, "mul", |x, y| x * y)?;
        let rg = self.rg(a) || self.rg(b);
        Ok(self.push(t, Op::Mul(a, b), rg))
    }

    /// Element-wise product with a fixed mask (e.g. dropout).
    pub fn mul_const(&mut self, a: NodeId, mask: Vec<T>) -> Result<NodeId> {
        let ta = self.value(a);
        if ta.len() != mask.len() {
            return Err(self.mismatch("mul_const", &[a], &format!("mask of length {}", mask.len())));
        }
        let out = ta.data().iter().zip(&mask).map(|(&x, &m)| x * m).collect();
        let t = Tensor::new(ta.shape().to_vec(), out)?;
        let rg = self.rg(a);
        Ok(self.push(t, Op::MulConst(a, mask), rg))
    }

    fn map(&mut self, a: NodeId, op: Op<T>, f: impl Fn(T) -> T) -> Result<NodeId> {
        let ta = self.value(a);
        let t = Tensor::new(ta.shape().to_vec(), ta.data().iter().map(|&x| f(x)).collect())?;
        let rg = self.rg(a);
        Ok(self.push(t, op, rg))
    }

    pub fn add_scalar(&mut self, a: NodeId, s: T) -> Result<NodeId> {
        self.map(a, Op::AddScalar(a), |x| x + s)
    }

    pub fn scale(&mut self, a: NodeId, s: T) -> Result<NodeId> {
        self.map(a, Op::Scale(a, s), |x| x * s)
    }

    pub fn relu(&mut self, a: NodeId) -> Result<NodeId> {
        self.map(a, Op::Relu(a), |x| if x > T::zero() { x } else { T::zero() })
    }

    pub fn sigmoid(&mut self, a: NodeId) -> Result<NodeId> {
        self.map(a, Op::Sigmoid(a), sigmoid)
    }

    pub fn exp(&mut self, a: NodeId) -> Result<NodeId> {
        self.map(a, Op::Exp(a), T::exp)
    }

    pub fn log(&mut self, a: NodeId) -> Result<NodeId> {
        self.map(a, Op::Log(a), T::ln)
    }

    pub fn abs(&mut self, a: NodeId) -> Result<NodeId> {
        self.map(a, Op::Abs(a), T::abs)
    }

    pub fn sum(&mut self, a: NodeId) -> Result<NodeId> {
        let s = self.value(a).data().iter().copied().sum();
        let rg = self.rg(a);
        Ok(self.push(Tensor::scalar(s), Op::Sum(a), rg))
    }

    pub fn mean(&mut self, a: NodeId) -> Result<NodeId> {
        let t = self.value(a);
        let n = T::from_usize(t.len()).expect("length fits scalar");
        let s = t.data().iter().copied().sum::<T>() / n;
        let rg = self.rg(a);
        Ok(self.push(Tensor::scalar(s), Op::Mean(a), rg))
    }

    /// `max |a|` over all entries (first occurrence on ties).
    pub fn max_abs(&mut self, a: NodeId) -> Result<NodeId> {
        let t = self.value(a);
        let mut best = 0;
        for (i, v) in t.data().iter().enumerate() {
            if v.abs() > t.data()[best].abs() {
                best = i;
            }
        }
        let v = t.data()[best].abs();
        let rg = self.rg(a);
        Ok(self.push(Tensor::scalar(v), Op::MaxAbs { input: a, argmax: best }, rg))
    }

    /// Column-wise concatenation of matrices with equal row counts.
    pub fn concat_cols(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        let Some(&first) = parts.first() else {
            return Err(Error::shape("concat_cols()", "no operands"));
        };
        let rows = self.value(first).rows();
        if parts.iter().any(|&p| self.value(p).rows() != rows) {
            return Err(self.mismatch("concat_cols", parts, "row counts differ"));
        }
        let widths: Vec<usize> = parts.iter().map(|&p| self.value(p).cols()).collect();
        let total: usize = widths.iter().sum();
        let mut out = Vec::with_capacity(rows * total);
        for r in 0..rows {
            for &p in parts {
                out.extend_from_slice(self.value(p).row(r));
            }
        }
        let rg = parts.iter().any(|&p| self.rg(p));
        Ok(self.push(Tensor::matrix(rows, total, out)?, Op::ConcatCols(parts.to_vec()), rg))
    }

    /// Rows of `a` picked (with repetition) by `index`.
    pub fn gather_rows(&mut self, a: NodeId, index: Vec<usize>) -> Result<NodeId> {
        let t = self.value(a);
        let (rows, c) = (t.rows(), t.cols());
        if let Some(&bad) = index.iter().find(|&&i| i >= rows) {
            return Err(self.mismatch("gather_rows", &[a], &format!("row index {bad} out of range")));
        }
        if index.is_empty() {
            return Err(self.mismatch("gather_rows", &[a], "empty index"));
        }
        let mut out = Vec::with_capacity(index.len() * c);
        for &i in &index {
            out.extend_from_slice(t.row(i));
        }
        let m = index.len();
        let rg = self.rg(a);
        Ok(self.push(Tensor::matrix(m, c, out)?, Op::GatherRows { input: a, index }, rg))
    }

    /// Column-wise max over consecutive groups of `group` rows:
    /// `(g·group)×d → g×d`. Backward routes each gradient to the single
    /// lowest-index row attaining the max.
    pub fn max_pool_rows(&mut self, a: NodeId, group: usize) -> Result<NodeId> {
        let t = self.value(a);
        let (rows, c) = (t.rows(), t.cols());
        if group == 0 || rows % group != 0 {
            return Err(self.mismatch("max_pool_rows", &[a], &format!("{rows} rows not divisible into groups of {group}")));
        }
        let groups = rows / group;
        let data = t.data();
        let mut out = Vec::with_capacity(groups * c);
        let mut argmax = Vec::with_capacity(groups * c);
        for g in 0..groups {
            let base = g * group;
            let mut best: Vec<usize> = (0..c).map(|j| base * c + j).collect();
            for r in base + 1..base + group {
                let row = &data[r * c..(r + 1) * c];
                for (j, &v) in row.iter().enumerate() {
                    if v > data[best[j]] {
                        best[j] = r * c + j;
                    }
                }
            }
            out.extend(best.iter().map(|&i| data[i]));
            argmax.extend(best);
        }
        let rg = self.rg(a);
        Ok(self.push(Tensor::matrix(groups, c, out)?, Op::MaxPoolRows { input: a, argmax }, rg))
    }

    /// Per-row monomials of the columns: `m×d → m×K` for a table of `K`
    /// exponent vectors of length `d`.
    pub fn monomials(&mut self, a: NodeId, exponents: Vec<Vec<u8>>) -> Result<NodeId> {
        let t = self.value(a);
        let (m, d) = (t.rows(), t.cols());
        if exponents.is_empty() || exponents.iter().any(|e| e.len() != d) {
            return Err(self.mismatch("monomials", &[a], &format!("exponent table does not match {d} columns")));
        }
        let k = exponents.len();
        let mut out = Vec::with_capacity(m * k);
        for r in 0..m {
            let row = t.row(r);
            out.extend(exponents.iter().map(|e| eval_monomial(e, row)));
        }
        let rg = self.rg(a);
        Ok(self.push(Tensor::matrix(m, k, out)?, Op::Monomials { input: a, exponents }, rg))
    }

    /// Multiplies each row `p` of `points` (`(b·group)×3`) by the 3×3 matrix
    /// stored row-major in row `b` of `mats` (`b×9`): `p ↦ p·M_b`.
    pub fn batched_transform(&mut self, points: NodeId, mats: NodeId, group: usize) -> Result<NodeId> {
        let (tp, tm) = (self.value(points), self.value(mats));
        if tp.cols() != 3 || tm.cols() != 9 || group == 0 || tp.rows() != tm.rows() * group {
            return Err(self.mismatch("batched_transform", &[points, mats], &format!("expected (b·{group})×3 points and b×9 matrices")));
        }
        let mut out = Vec::with_capacity(tp.len());
        for r in 0..tp.rows() {
            let p = tp.row(r);
            let m = tm.row(r / group);
            for j in 0..3 {
                out.push(p[0] * m[j] + p[1] * m[3 + j] + p[2] * m[6 + j]);
            }
        }
        let shape = tp.shape().to_vec();
        let rg = self.rg(points) || self.rg(mats);
        Ok(self.push(Tensor::new(shape, out)?, Op::BatchedTransform { points, mats, group }, rg))
    }

    /// Mean over rows of `−log softmax(logits_r)[label_r]`.
    pub fn softmax_cross_entropy(&mut self, logits: NodeId, labels: &[usize]) -> Result<NodeId> {
        let t = self.value(logits);
        let (b, c) = (t.rows(), t.cols());
        if labels.len() != b {
            return Err(self.mismatch("softmax_xent", &[logits], &format!("{} labels for {b} rows", labels.len())));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
            return Err(Error::LabelOutOfRange { label: bad, classes: c });
        }
        let mut probs = Vec::with_capacity(b * c);
        let mut loss = T::zero();
        for (r, &label) in labels.iter().enumerate() {
            let (p, l) = softmax_xent_row(t.row(r), label);
            loss += l;
            probs.extend(p);
        }
        loss /= T::from_usize(b).expect("batch fits scalar");
        let rg = self.rg(logits);
        let op = Op::SoftmaxXent { logits, labels: labels.to_vec(), probs };
        Ok(self.push(Tensor::scalar(loss), op, rg))
    }

    /// Mean binary cross-entropy of `sigmoid(logits)` against `targets` in
    /// `[0, 1]`, evaluated without forming the sigmoid.
    pub fn bce_with_logits(&mut self, logits: NodeId, targets: Vec<T>) -> Result<NodeId> {
        let t = self.value(logits);
        if t.len() != targets.len() {
            return Err(self.mismatch("bce_with_logits", &[logits], &format!("{} targets", targets.len())));
        }
        let mut loss = T::zero();
        for (&z, &y) in t.data().iter().zip(&targets) {
            loss += z.max(T::zero()) - z * y + (-z.abs()).exp().ln_1p();
        }
        loss /= T::from_usize(targets.len()).expect("length fits scalar");
        let rg = self.rg(logits);
        Ok(self.push(Tensor::scalar(loss), Op::BceWithLogits { logits, targets }, rg))
    }

    /// `x·W + b`.
    pub fn linear(&mut self, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId> {
        let h = self.matmul(x, w)?;
        self.add_bias(h, b)
    }

    /// Reverse-mode sweep from a scalar `loss`.
    pub fn backward(&self, loss: NodeId) -> Result<Gradients<T>> {
        if self.value(loss).len() != 1 {
            return Err(self.mismatch("backward", &[loss], "loss must be a single value"));
        }
        let mut grads: Vec<Option<Vec<T>>> = Vec::with_capacity(loss.0 + 1);
        grads.resize_with(loss.0 + 1, || None);
        grads[loss.0] = Some(vec![T::one()]);

        for id in (0..=loss.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &self.nodes[id];
            if node.requires_grad {
                self.propagate(node, &g, &mut grads);
            }
            grads[id] = Some(g);
        }
        Ok(Gradients { grads, params: self.params.clone() })
    }

    fn propagate(&self, node: &Node<T>, g: &[T], grads: &mut [Option<Vec<T>>]) {
        let val = |id: NodeId| &self.nodes[id.0].value;
        let want = |id: NodeId| self.nodes[id.0].requires_grad;
        let y = &node.value;
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (ta, tb) = (val(*a), val(*b));
                let (m, k, n) = (ta.rows(), ta.cols(), tb.cols());
                if want(*a) {
                    // dA = dC · Bᵀ
                    accumulate(&mut grads[a.0], m * k, |ga| {
                        T::gemm(m, n, k, g, (n, 1), tb.data(), (1, n), ga, (k, 1), true)
                    });
                }
                if want(*b) {
                    // dB = Aᵀ · dC
                    accumulate(&mut grads[b.0], k * n, |gb| {
                        T::gemm(k, m, n, ta.data(), (1, k), g, (n, 1), gb, (n, 1), true)
                    });
                }
            }
            Op::Dense { x, w, b, relu } => {
                let (tx, tw) = (val(*x), val(*w));
                let (m, k, n) = (tx.rows(), tx.cols(), tw.cols());
                // Gradient at the pre-activation; ReLU passes it where the
                // output is positive.
                let masked: Vec<T>;
                let gz: &[T] = if *relu {
                    masked = g.iter().zip(y.data()).map(|(&gv, &yv)| if yv > T::zero() { gv } else { T::zero() }).collect();
                    &masked
                } else {
                    g
                };
                if want(*x) {
                    accumulate(&mut grads[x.0], m * k, |gx| {
                        T::gemm(m, n, k, gz, (n, 1), tw.data(), (1, n), gx, (k, 1), true)
                    });
                }
                if want(*w) {
                    accumulate(&mut grads[w.0], k * n, |gw| {
                        T::gemm(k, m, n, tx.data(), (1, k), gz, (n, 1), gw, (n, 1), true)
                    });
                }
                if want(*b) {
                    accumulate(&mut grads[b.0], n, |gb| {
                        for row in gz.chunks(n) {
                            for (acc, &v) in gb.iter_mut().zip(row) {
                                *acc += v;
                            }
                        }
                    });
                }
            }
            Op::AddBias(a, b) => {
                if want(*a) {
                    add_into(&mut grads[a.0], g);
                }
                if want(*b) {
                    let c = val(*b).len();
                    accumulate(&mut grads[b.0], c, |gb| {
                        for row in g.chunks(c) {
                            for (acc, &v) in gb.iter_mut().zip(row) {
                                *acc += v;
                            }
                        }
                    });
                }
            }
            Op::Add(a, b) => {
                if want(*a) {
                    add_into(&mut grads[a.0], g);
                }
                if want(*b) {
                    add_into(&mut grads[b.0], g);
                }
            }
            Op::Sub(a, b) => {
                if want(*a) {
                    add_into(&mut grads[a.0], g);
                }
                if want(*b) {
                    map_into(&mut grads[b.0], g.len(), |i| -g[i]);
                }
            }
            Op::Mul(a, b) => {
                let (ta, tb) = (val(*a).data(), val(*b).data());
                if want(*a) {
                    map_into(&mut grads[a.0], g.len(), |i| g[i] * tb[i]);
                }
                if want(*b) {
                    map_into(&mut grads[b.0], g.len(), |i| g[i] * ta[i]);
                }
            }
            Op::MulConst(a, mask) => map_into(&mut grads[a.0], g.len(), |i| g[i] * mask[i]),
            Op::AddScalar(a) => add_into(&mut grads[a.0], g),
            Op::Scale(a, s) => map_into(&mut grads[a.0], g.len(), |i| g[i] * *s),
            Op::Relu(a) => {
                let x = val(*a).data();
                map_into(&mut grads[a.0], g.len(), |i| if x[i] > T::zero() { g[i] } else { T::zero() });
            }
            Op::Sigmoid(a) => {
                let s = y.data();
                map_into(&mut grads[a.0], g.len(), |i| g[i] * s[i] * (T::one() - s[i]));
            }
            Op::Exp(a) => {
                let e = y.data();
                map_into(&mut grads[a.0], g.len(), |i| g[i] * e[i]);
            }
            Op::Log(a) => {
                let x = val(*a).data();
                map_into(&mut grads[a.0], g.len(), |i| g[i] / x[i]);
            }
            Op::Abs(a) => {
                let x = val(*a).data();
                map_into(&mut grads[a.0], g.len(), |i| g[i] * sign(x[i]));
            }
            Op::Sum(a) => {
                let n = val(*a).len();
                map_into(&mut grads[a.0], n, |_| g[0]);
            }
            Op::Mean(a) => {
                let n = val(*a).len();
                let s = g[0] / T::from_usize(n).expect("length fits scalar");
                map_into(&mut grads[a.0], n, |_| s);
            }
            Op::MaxAbs { input, argmax } => {
                let x = val(*input).data();
                let n = x.len();
                let i = *argmax;
                accumulate(&mut grads[input.0], n, |gi| gi[i] += g[0] * sign(x[i]));
            }
            Op::ConcatCols(parts) => {
                let rows = y.rows();
                let total = y.cols();
                let mut offset = 0;
                for &p in parts {
                    let w = val(p).cols();
                    if want(p) {
                        accumulate(&mut grads[p.0], rows * w, |gp| {
                            for r in 0..rows {
                                let src = &g[r * total + offset..r * total + offset + w];
                                for (acc, &v) in gp[r * w..(r + 1) * w].iter_mut().zip(src) {
                                    *acc += v;
                                }
                            }
                        });
                    }
                    offset += w;
                }
            }
            Op::GatherRows { input, index } => {
                let t = val(*input);
                let c = t.cols();
                accumulate(&mut grads[input.0], t.len(), |gi| {
                    for (slot, &r) in index.iter().enumerate() {
                        for (acc, &v) in gi[r * c..(r + 1) * c].iter_mut().zip(&g[slot * c..(slot + 1) * c]) {
                            *acc += v;
                        }
                    }
                });
            }
            Op::MaxPoolRows { input, argmax } => {
                let n = val(*input).len();
                accumulate(&mut grads[input.0], n, |gi| {
                    for (o, &src) in argmax.iter().enumerate() {
                        gi[src] += g[o];
                    }
                });
            }
            Op::Monomials { input, exponents } => {
                let t = val(*input);
                let (m, d, k) = (t.rows(), t.cols(), exponents.len());
                accumulate(&mut grads[input.0], m * d, |gi| {
                    for r in 0..m {
                        let row = t.row(r);
                        for (e_idx, e) in exponents.iter().enumerate() {
                            let up = g[r * k + e_idx];
                            if up == T::zero() {
                                continue;
                            }
                            for i in 0..d {
                                if e[i] > 0 {
                                    gi[r * d + i] += up * monomial_partial(e, row, i);
                                }
                            }
                        }
                    }
                });
            }
            Op::BatchedTransform { points, mats, group } => {
                let (tp, tm) = (val(*points), val(*mats));
                let rows = tp.rows();
                if want(*points) {
                    accumulate(&mut grads[points.0], rows * 3, |gp| {
                        for r in 0..rows {
                            let m = tm.row(r / group);
                            let go = &g[r * 3..r * 3 + 3];
                            for i in 0..3 {
                                gp[r * 3 + i] += go[0] * m[3 * i] + go[1] * m[3 * i + 1] + go[2] * m[3 * i + 2];
                            }
                        }
                    });
                }
                if want(*mats) {
                    accumulate(&mut grads[mats.0], tm.len(), |gm| {
                        for r in 0..rows {
                            let p = tp.row(r);
                            let go = &g[r * 3..r * 3 + 3];
                            let b = r / group;
                            for i in 0..3 {
                                for j in 0..3 {
                                    gm[b * 9 + 3 * i + j] += p[i] * go[j];
                                }
                            }
                        }
                    });
                }
            }
            Op::SoftmaxXent { logits, labels, probs } => {
                let c = val(*logits).cols();
                let scale = g[0] / T::from_usize(labels.len()).expect("batch fits scalar");
                accumulate(&mut grads[logits.0], probs.len(), |gl| {
                    for (i, (acc, &p)) in gl.iter_mut().zip(probs).enumerate() {
                        let onehot = if labels[i / c] == i % c { T::one() } else { T::zero() };
                        *acc += scale * (p - onehot);
                    }
                });
            }
            Op::BceWithLogits { logits, targets } => {
                let z = val(*logits).data();
                let scale = g[0] / T::from_usize(targets.len()).expect("length fits scalar");
                map_into(&mut grads[logits.0], z.len(), |i| scale * (sigmoid(z[i]) - targets[i]));
            }
        }
    }
}

fn add_into<T: Real>(slot: &mut Option<Vec<T>>, g: &[T]) {
    accumulate(slot, g.len(), |buf| {
        for (acc, &v) in buf.iter_mut().zip(g) {
            *acc += v;
        }
    });
}

fn map_into<T: Real>(slot: &mut Option<Vec<T>>, len: usize, f: impl Fn(usize) -> T) {
    accumulate(slot, len, |buf| {
        for (i, acc) in buf.iter_mut().enumerate() {
            *acc += f(i);
        }
    });
}

fn sign<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

pub fn sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Softmax probabilities and `−log p[label]` for one row, max-subtracted.
pub fn softmax_xent_row<T: Real>(logits: &[T], label: usize) -> (Vec<T>, T) {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    let loss = total.ln() - (logits[label] - max);
    (exps.into_iter().map(|e| e / total).collect(), loss)
}
