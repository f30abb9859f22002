//! The point-cloud classifier, its configuration, training and evaluation.

mod config;
mod metrics;
mod net;
mod train;

pub use config::{ModelConfig, PolynomialOrder, TrainConfig, LEARNABLE_COLUMNS};
pub use metrics::{argmax, Metrics};
pub use net::{edge_rows, second_order_input, Forward, MomentNet, Pass};
pub use train::{evaluate, robustness_sweep, train, train_step, EpochRecord, Sweep, SweepPoint, TrainReport, EVAL_BATCH};
