//! Minimal reverse-mode autodiff engine and the layers the classifier needs.

mod adam;
mod checkpoint;
mod graph;
mod init;
mod params;
mod tensor;
mod units;

pub use adam::{adam_step, AdamState};
pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use graph::{sigmoid, softmax_xent_row, Gradients, Graph, NodeId};
pub use init::{init_weights, normal_vec, Init, LayerKind, LayerSpec};
pub use params::ParamStore;
pub use tensor::Tensor;
pub use units::{
    column, high_order_exponents, high_order_node, high_order_unit, learnable_order_node, learnable_order_unit,
    perceptron_unit, square_node, square_unit, HighOrderWeights, LEARNABLE_ORDER_EPS,
};
