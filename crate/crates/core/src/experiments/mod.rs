//! Small, fully deterministic studies of what polynomial inputs buy a ReLU
//! network: fitting `x²` with narrow networks of growing depth, and
//! separating two interleaved spirals with and without quadratic features.

mod mlp;
mod spiral;
mod toy_x2;

pub use mlp::Mlp;
pub use spiral::{spiral_features, toy_spiral, two_spirals, GridCell, SpiralConfig, SpiralReport, SpiralSet};
pub use toy_x2::{fit_x2, toy_x2, DepthSummary, ToyX2Config, ToyX2Report, X2Run};
