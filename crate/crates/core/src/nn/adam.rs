use indexmap::IndexMap;

use super::params::ParamStore;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub step: u64,
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub eps: T,
    first: IndexMap<String, Vec<T>>,
    second: IndexMap<String, Vec<T>>,
}

impl<T: Real> AdamState<T> {
    /// β1 = 0.9, β2 = 0.999, ε = 1e-8.
    pub fn new(lr: T) -> Self {
        AdamState {
            step: 0,
            lr,
            beta1: T::lit(0.9),
            beta2: T::lit(0.999),
            eps: T::lit(1e-8),
            first: IndexMap::new(),
            second: IndexMap::new(),
        }
    }
}

impl<T: Real> Default for AdamState<T> {
    fn default() -> Self {
        Self::new(T::lit(0.01))
    }
}

/// One bias-corrected Adam update of every parameter that has a gradient.
pub fn adam_step<T: Real>(params: &mut ParamStore<T>, grads: &IndexMap<String, Vec<T>>, state: &mut AdamState<T>) -> Result<()> {
    for (name, g) in grads {
        let len = params.get(name)?.len();
        if g.len() != len {
            return Err(Error::shape(format!("adam `{name}`"), format!("gradient of length {} for {len} parameters", g.len())));
        }
    }
    state.step += 1;
    let t = i32::try_from(state.step).unwrap_or(i32::MAX);
    let (b1, b2) = (state.beta1, state.beta2);
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    for (name, g) in grads {
        let p = params.get_mut(name)?.data_mut();
        let m = state.first.entry(name.clone()).or_insert_with(|| vec![T::zero(); g.len()]);
        let v = state.second.entry(name.clone()).or_insert_with(|| vec![T::zero(); g.len()]);
        for i in 0..g.len() {
            m[i] = b1 * m[i] + (T::one() - b1) * g[i];
            v[i] = b2 * v[i] + (T::one() - b2) * g[i] * g[i];
            let mh = m[i] / c1;
            let vh = v[i] / c2;
            p[i] -= state.lr * mh / (vh.sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tensor;

    fn store(v: Vec<f64>) -> ParamStore<f64> {
        let mut s = ParamStore::new();
        s.insert("w", Tensor::row_vector(v).unwrap());
        s
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = store(vec![1.0, -2.0]);
        let mut st = AdamState::default();
        let g: IndexMap<String, Vec<f64>> = [("w".to_string(), vec![0.0, 0.0])].into_iter().collect();
        for _ in 0..3 {
            adam_step(&mut p, &g, &mut st).unwrap();
        }
        assert_eq!(p.get("w").unwrap().data(), &[1.0, -2.0]);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = store(vec![1.0, 1.0]);
        let mut st = AdamState::new(0.01);
        let g: IndexMap<String, Vec<f64>> = [("w".to_string(), vec![3.0, -0.2])].into_iter().collect();
        adam_step(&mut p, &g, &mut st).unwrap();
        let d = p.get("w").unwrap().data();
        assert!((d[0] - 0.99).abs() < 1e-6);
        assert!((d[1] - 1.01).abs() < 1e-6);
    }

    #[test]
    fn mismatched_gradient_errors() {
        let mut p = store(vec![1.0]);
        let g: IndexMap<String, Vec<f64>> = [("w".to_string(), vec![0.0, 0.0])].into_iter().collect();
        assert!(adam_step(&mut p, &g, &mut AdamState::default()).is_err());
    }
}
