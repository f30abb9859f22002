//! Farthest point sampling and brute-force k-nearest-neighbor graphs.

use std::cmp::Ordering;

use super::point::{Point3, PointCloud};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Greedy max-min subset of `m` indices starting at `start`.
///
/// Each step picks the unselected point with the largest distance to the
/// selected set; ties go to the lowest index. O(n·m).
pub fn fps<T: Real>(cloud: &PointCloud<T>, m: usize, start: usize) -> Result<Vec<usize>> {
    let n = cloud.len();
    if m == 0 || m > n {
        return Err(Error::InvalidCount(format!("fps needs 1 <= m <= n, got m = {m}, n = {n}")));
    }
    if start >= n {
        return Err(Error::InvalidCount(format!("fps start index {start} out of range for n = {n}")));
    }
    let pts = cloud.points();
    let mut min_dist = vec![T::infinity(); n];
    let mut taken = vec![false; n];
    let mut out = Vec::with_capacity(m);
    let mut current = start;
    loop {
        out.push(current);
        taken[current] = true;
        if out.len() == m {
            break;
        }
        let c = pts[current];
        let mut best: Option<(usize, T)> = None;
        for (i, p) in pts.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d = p.dist_squared(c);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
            if best.is_none_or(|(_, bd)| min_dist[i] > bd) {
                best = Some((i, min_dist[i]));
            }
        }
        current = best.expect("unselected point remains").0;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnGraph<T> {
    k: usize,
    neighbors: Vec<usize>,
    edge_features: Vec<Point3<T>>,
}

impl<T: Real> KnnGraph<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_points(&self) -> usize {
        self.neighbors.len() / self.k
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }

    /// `neighbor − point` for each of point `i`'s neighbors.
    pub fn edge_features(&self, i: usize) -> &[Point3<T>] {
        &self.edge_features[i * self.k..(i + 1) * self.k]
    }

    /// All neighbor lists concatenated, `n·k` entries.
    pub fn flat_neighbors(&self) -> &[usize] {
        &self.neighbors
    }
}

fn by_distance_then_index<T: Real>(a: &(T, usize), b: &(T, usize)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// Nearest-neighbor indices for a row-major `n×3` coordinate buffer: `n·k`
/// entries, self excluded, sorted by distance with ties to the lower index.
pub fn knn_indices<T: Real>(coords: &[T], k: usize) -> Result<Vec<usize>> {
    if coords.len() % 3 != 0 {
        return Err(Error::shape("knn", format!("coordinate buffer of length {} is not n×3", coords.len())));
    }
    let n = coords.len() / 3;
    if k == 0 {
        return Err(Error::InvalidCount("k must be >= 1".into()));
    }
    if k >= n {
        return Err(Error::KTooLarge { k, n });
    }
    let at = |i: usize| Point3::new(coords[3 * i], coords[3 * i + 1], coords[3 * i + 2]);
    let mut out = Vec::with_capacity(n * k);
    let mut cand: Vec<(T, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let p = at(i);
        cand.clear();
        cand.extend((0..n).filter(|&j| j != i).map(|j| (at(j).dist_squared(p), j)));
        cand.select_nth_unstable_by(k - 1, by_distance_then_index);
        let head = &mut cand[..k];
        head.sort_unstable_by(by_distance_then_index);
        out.extend(head.iter().map(|&(_, j)| j));
    }
    Ok(out)
}

/// Euclidean kNN graph with `(neighbor − point)` edge features.
pub fn knn_graph<T: Real>(cloud: &PointCloud<T>, k: usize) -> Result<KnnGraph<T>> {
    let neighbors = knn_indices(&cloud.to_flat(), k)?;
    let edge_features = neighbors
        .iter()
        .enumerate()
        .map(|(slot, &j)| cloud.get(j) - cloud.get(slot / k))
        .collect();
    Ok(KnnGraph { k, neighbors, edge_features })
}
