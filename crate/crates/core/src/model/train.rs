use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::TrainConfig;
use super::metrics::{argmax, Metrics};
use super::net::{MomentNet, Pass};
use crate::dataio::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::geometry::{augment, rotate_y, AugmentOptions, PointCloud};
use crate::nn::{adam_step, softmax_xent_row, AdamState, Graph};
use crate::rng;
use crate::scalar::Real;

/// Clouds evaluated per forward pass.
pub const EVAL_BATCH: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub lr: f64,
    /// Mean training loss over the epoch's mini-batches.
    pub loss: f64,
    /// Training accuracy measured on the augmented, dropout-on batches.
    pub train_accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<Metrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub history: Vec<EpochRecord>,
    pub steps: u64,
}

impl TrainReport {
    pub fn final_loss(&self) -> Option<f64> {
        self.history.last().map(|r| r.loss)
    }
}

/// One Adam update on a labelled batch; returns the batch loss and the
/// number of correct predictions.
pub fn train_step<T: Real>(
    model: &mut MomentNet<T>,
    adam: &mut AdamState<T>,
    clouds: &[&PointCloud<T>],
    labels: &[usize],
    dropout_seed: u64,
) -> Result<(f64, usize)> {
    let mut g = Graph::new();
    let (loss, fwd) = model.loss(&mut g, clouds, labels, Pass::Train { dropout_seed })?;
    let logits = g.value(fwd.logits);
    let correct = (0..logits.rows())
        .filter(|&r| argmax(&to_f64(logits.row(r))) == labels[r])
        .count();
    let loss_value = g.value(loss).item().to_f64_lossy();
    let params = model.params();
    let grads = g.backward(loss)?.param_grads(|name| params.get(name).map_or(0, |t| t.len()));
    adam_step(model.params_mut(), &grads, adam)?;
    Ok((loss_value, correct))
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

/// Shuffled mini-batch training with per-sample augmentation, Adam and a
/// step learning-rate schedule. Deterministic for a given configuration.
/// `on_epoch` sees every record as soon as it is complete.
pub fn train<T: Real>(
    model: &mut MomentNet<T>,
    data: &Dataset<T>,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainReport> {
    cfg.validate()?;
    if data.train.is_empty() {
        return Err(Error::EmptySplit("training split is empty".into()));
    }
    if let Some(s) = data.train.iter().find(|s| s.label >= model.config().num_classes) {
        return Err(Error::LabelOutOfRange { label: s.label, classes: model.config().num_classes });
    }
    let mut adam = AdamState::new(T::lit(cfg.lr));
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    for epoch in 0..cfg.epochs {
        let lr = cfg.lr_at(epoch);
        adam.lr = T::lit(lr);
        let epoch_seed = rng::derive_seed(cfg.seed, epoch as u64);
        order.shuffle(&mut rng::seeded(epoch_seed));

        let (mut loss_sum, mut correct, mut batches) = (0.0, 0usize, 0usize);
        for (bi, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let batch_seed = rng::derive_seed(epoch_seed, bi as u64 + 1);
            let clouds = chunk
                .iter()
                .map(|&i| augment(&data.train[i].cloud, rng::derive_seed(batch_seed, i as u64), &cfg.augment))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&PointCloud<T>> = clouds.iter().collect();
            let labels: Vec<usize> = chunk.iter().map(|&i| data.train[i].label).collect();
            let (l, c) = train_step(model, &mut adam, &refs, &labels, batch_seed)?;
            if !l.is_finite() {
                return Err(Error::NonFinite(epoch));
            }
            loss_sum += l;
            correct += c;
            batches += 1;
        }

        let last = epoch + 1 == cfg.epochs;
        let due = cfg.eval_every > 0 && (epoch + 1) % cfg.eval_every == 0;
        let test = if (last || due) && !data.test.is_empty() { Some(evaluate(model, &data.test)?) } else { None };
        let record = EpochRecord {
            epoch: epoch + 1,
            lr,
            loss: loss_sum / batches as f64,
            train_accuracy: correct as f64 / data.train.len() as f64,
            test,
        };
        on_epoch(&record);
        history.push(record);
    }
    Ok(TrainReport { history, steps: adam.step })
}

/// Accuracy and mean loss over `samples` in evaluation mode.
pub fn evaluate<T: Real>(model: &MomentNet<T>, samples: &[Sample<T>]) -> Result<Metrics> {
    if samples.is_empty() {
        return Err(Error::EmptySplit("evaluation split is empty".into()));
    }
    let clouds: Vec<&PointCloud<T>> = samples.iter().map(|s| &s.cloud).collect();
    let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();
    evaluate_clouds(model, &clouds, &labels)
}

fn evaluate_clouds<T: Real>(model: &MomentNet<T>, clouds: &[&PointCloud<T>], labels: &[usize]) -> Result<Metrics> {
    let c = model.config().num_classes;
    if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
        return Err(Error::LabelOutOfRange { label: bad, classes: c });
    }
    let mut predictions = Vec::with_capacity(clouds.len());
    let mut loss = 0.0;
    let mut start = 0;
    while start < clouds.len() {
        // batches hold clouds of equal size
        let n = clouds[start].len();
        let mut end = start + 1;
        while end < clouds.len() && end - start < EVAL_BATCH && clouds[end].len() == n {
            end += 1;
        }
        for (row, &label) in model.logits(&clouds[start..end])?.iter().zip(&labels[start..end]) {
            let row = to_f64(row);
            predictions.push(argmax(&row));
            loss += softmax_xent_row(&row, label).1;
        }
        start = end;
    }
    let mut m = Metrics::from_predictions(&predictions, labels, c)?;
    m.loss = Some(loss / clouds.len() as f64);
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "values")]
pub enum Sweep {
    /// Fractions of points removed at random.
    DropoutRatios(Vec<f64>),
    /// Rotations about the y axis, in degrees.
    YAngles(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub metrics: Metrics,
}

/// Accuracy on perturbed copies of `samples` for every sweep value. Dropout
/// masks are drawn from `seed`; the value 0 leaves clouds untouched.
pub fn robustness_sweep<T: Real>(model: &MomentNet<T>, samples: &[Sample<T>], sweep: &Sweep, seed: u64) -> Result<Vec<SweepPoint>> {
    if samples.is_empty() {
        return Err(Error::EmptySplit("sweep split is empty".into()));
    }
    let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();
    let (values, perturb): (&[f64], Box<dyn Fn(usize, &PointCloud<T>, f64) -> Result<PointCloud<T>>>) = match sweep {
        Sweep::DropoutRatios(v) => (
            v,
            Box::new(move |i, c, r| {
                let opts = AugmentOptions { dropout_ratio: r, ..AugmentOptions::default() };
                augment(c, rng::derive_seed(seed, i as u64), &opts)
            }),
        ),
        Sweep::YAngles(v) => (v, Box::new(|_, c, deg: f64| rotate_y(c, T::lit(deg.to_radians())))),
    };
    let mut out = Vec::with_capacity(values.len());
    for &value in values {
        let clouds = samples
            .iter()
            .enumerate()
            .map(|(i, s)| perturb(i, &s.cloud, value))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&PointCloud<T>> = clouds.iter().collect();
        out.push(SweepPoint { value, metrics: evaluate_clouds(model, &refs, &labels)? });
    }
    Ok(out)
}
