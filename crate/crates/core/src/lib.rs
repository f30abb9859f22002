//! Moment-based point-cloud classification.
//!
//! Points are lifted with second-order monomials `(x², y², z², xy, xz, yz)`,
//! combined with k-nearest-neighbor edge features, and classified by a
//! point-wise network with a max-pooled global feature. The crate also
//! carries the geometric tooling (moments, canonical pose, sampling), a small
//! reverse-mode autodiff engine, dataset generation and file formats, and the
//! toy experiments used to study polynomial inputs.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`, which is what training and the
//! gradient checks assume.

pub mod dataio;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod model;
pub mod nn;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::Point3<f64>;
pub type Cloud = geometry::PointCloud<f64>;
pub type Cloud32 = geometry::PointCloud<f32>;
pub type Matrix3 = geometry::Mat3<f64>;
pub type Rigid = geometry::RigidTransform<f64>;
pub type Moments = geometry::MomentSummary<f64>;
pub type Knn = geometry::KnnGraph<f64>;
pub type Tensor64 = nn::Tensor<f64>;
pub type Graph64 = nn::Graph<f64>;
pub type Params = nn::ParamStore<f64>;
pub type Adam = nn::AdamState<f64>;
pub type Model = model::MomentNet<f64>;
pub type Dataset = dataio::Dataset<f64>;
