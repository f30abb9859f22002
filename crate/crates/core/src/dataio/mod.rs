//! Dataset ingestion and generation: OFF meshes, surface sampling, cloud
//! files, procedural shapes, and manifests with train/test splits.

mod cloud_io;
mod manifest;
mod off;
mod surface;
mod synthetic;

pub use cloud_io::{decode_mpc1, decode_xyz, encode_mpc1, encode_xyz, read_cloud, write_cloud, CloudFormat, MPC1_MAGIC};
pub use manifest::{
    build_benchmark, load_dataset, materialize, BenchmarkSpec, Dataset, DatasetManifest, ManifestEntry, Sample, Split,
    MANIFEST_FILE,
};
pub use off::{parse_off, serialize_off, triangle_area, TriangleMesh, DEGENERATE_AREA};
pub use surface::{sample_surface, sample_surface_candidates, triangle_point, CANDIDATE_FACTOR};
pub use synthetic::{generate_synthetic, sample_canonical, ShapeKind, SyntheticShapeRecipe, MIN_SYNTHETIC_POINTS};
