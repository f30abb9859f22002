use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification accuracy summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Correct predictions over all samples.
    pub overall: f64,
    /// Unweighted mean of the per-class accuracies of classes present in
    /// the split.
    pub mean_class: f64,
    /// Accuracy per class; `None` for classes with no samples.
    pub per_class: Vec<Option<f64>>,
    /// Samples per class.
    pub support: Vec<usize>,
    /// Mean cross-entropy, when logits were available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
}

impl Metrics {
    pub fn from_predictions(predictions: &[usize], labels: &[usize], num_classes: usize) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::InvalidCount(format!(
                "{} predictions for {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        if labels.is_empty() {
            return Err(Error::EmptySplit("no samples to evaluate".into()));
        }
        let mut correct = vec![0usize; num_classes];
        let mut support = vec![0usize; num_classes];
        for (&p, &l) in predictions.iter().zip(labels) {
            if l >= num_classes {
                return Err(Error::LabelOutOfRange { label: l, classes: num_classes });
            }
            support[l] += 1;
            if p == l {
                correct[l] += 1;
            }
        }
        let per_class: Vec<Option<f64>> = correct
            .iter()
            .zip(&support)
            .map(|(&c, &s)| (s > 0).then(|| c as f64 / s as f64))
            .collect();
        let present: Vec<f64> = per_class.iter().flatten().copied().collect();
        let overall = correct.iter().sum::<usize>() as f64 / labels.len() as f64;
        let mean_class = present.iter().sum::<f64>() / present.len() as f64;
        Ok(Metrics { overall, mean_class, per_class, support, loss: None })
    }
}

/// Index of the largest logit (lowest index on ties).
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}
