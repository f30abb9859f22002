//! Geometric computation on point clouds: moments, canonical pose, sampling,
//! neighbor graphs and augmentation.
//!
//! Every function is pure and generic over the scalar type.

mod augment;
mod lift;
mod linalg;
mod moments;
mod point;
mod sampling;
mod transform;

pub use augment::{augment, rotate_y, AugmentOptions};
pub use lift::{eval_monomial, lift_exponents, monomial_partial, polynomial_lift, CUBIC_EXPONENTS, ORDER2_EXPONENTS};
pub use linalg::{fix_sign, symmetric_eigen, Mat3, JACOBI_MAX_SWEEPS};
pub use moments::{
    canonicalize, centroid, normalize_to_unit_sphere, principal_directions, second_moment_matrix, Canonical,
    MomentSummary, DEGENERACY_RTOL,
};
pub use point::{Point3, PointCloud};
pub use sampling::{fps, knn_graph, knn_indices, KnnGraph};
pub use transform::{apply_rigid, RigidTransform, ScaleRecord, ROTATION_TOL};
