//! Area-weighted random sampling of mesh surfaces.

use rand::Rng as _;

use super::off::TriangleMesh;
use crate::error::{Error, Result};
use crate::geometry::{fps, Point3, PointCloud};
use crate::rng;
use crate::scalar::Real;

/// Candidates drawn per output point before farthest point sampling.
pub const CANDIDATE_FACTOR: usize = 4;

/// Uniform point in triangle `abc` from two uniforms in `[0, 1)`.
pub fn triangle_point<T: Real>(a: Point3<T>, b: Point3<T>, c: Point3<T>, r1: f64, r2: f64) -> Point3<T> {
    let s = r1.sqrt();
    let (u, v, w) = (1.0 - s, s * (1.0 - r2), s * r2);
    a * T::lit(u) + b * T::lit(v) + c * T::lit(w)
}

/// `count` area-weighted surface points and the face each came from.
pub fn sample_surface_candidates<T: Real>(
    mesh: &TriangleMesh<T>,
    count: usize,
    seed: u64,
) -> Result<(Vec<Point3<T>>, Vec<usize>)> {
    let mut cumulative = Vec::with_capacity(mesh.faces.len());
    let mut total = 0.0f64;
    for f in 0..mesh.faces.len() {
        total += mesh.face_area(f).to_f64_lossy();
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(Error::ZeroArea);
    }
    let mut r = rng::seeded(seed);
    let mut points = Vec::with_capacity(count);
    let mut faces = Vec::with_capacity(count);
    for _ in 0..count {
        let target = r.random::<f64>() * total;
        let f = cumulative.partition_point(|&c| c <= target).min(cumulative.len() - 1);
        let [a, b, c] = mesh.faces[f];
        let (r1, r2) = (r.random::<f64>(), r.random::<f64>());
        points.push(triangle_point(mesh.vertices[a], mesh.vertices[b], mesh.vertices[c], r1, r2));
        faces.push(f);
    }
    Ok((points, faces))
}

/// `n` surface points: `4n` area-weighted candidates thinned by farthest
/// point sampling. Deterministic per seed.
pub fn sample_surface<T: Real>(mesh: &TriangleMesh<T>, n: usize, seed: u64) -> Result<PointCloud<T>> {
    if n == 0 {
        return Err(Error::InvalidCount("sample count must be >= 1".into()));
    }
    let (candidates, _) = sample_surface_candidates(mesh, n * CANDIDATE_FACTOR, seed)?;
    let cloud = PointCloud::new(candidates)?;
    let picked = fps(&cloud, n, 0)?;
    cloud.select(&picked)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> TriangleMesh<f64> {
        let v = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
        TriangleMesh::new(v, vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn points_stay_inside_triangle() {
        let c = sample_surface(&triangle(), 3, 5).unwrap();
        assert_eq!(c.len(), 3);
        for p in c.iter() {
            // barycentric coordinates for this right triangle
            let (v, w) = (p.x / 2.0, p.y);
            assert!(v >= 0.0 && w >= 0.0 && v + w <= 1.0 + 1e-12 && p.z == 0.0);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = sample_surface(&triangle(), 16, 9).unwrap();
        let b = sample_surface(&triangle(), 16, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_area_is_an_error() {
        let v = vec![Point3::new(0.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0), Point3::new(2.0, 0.0, 0.0)];
        let m = TriangleMesh::new(v, vec![[0, 1, 2]]).unwrap();
        assert!(matches!(sample_surface(&m, 4, 0), Err(Error::ZeroArea)));
    }
}
