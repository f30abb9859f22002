//! Independent reference implementations used as test oracles. Deliberately
//! naive: no shared code with the library beyond the point type.
#![allow(dead_code)]

use momentnet::geometry::{Point3, PointCloud};
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_cloud(r: &mut impl Rng, n: usize, scale: [f64; 3]) -> PointCloud<f64> {
    let pts = (0..n)
        .map(|_| {
            Point3::new(
                r.random_range(-1.0..1.0) * scale[0],
                r.random_range(-1.0..1.0) * scale[1],
                r.random_range(-1.0..1.0) * scale[2],
            )
        })
        .collect();
    PointCloud::new(pts).unwrap()
}

/// Small integer coordinates, so squared distances are exact and ties are
/// frequent.
pub fn integer_cloud(r: &mut impl Rng, n: usize) -> PointCloud<f64> {
    let pts = (0..n)
        .map(|_| Point3::new(r.random_range(-4..=4) as f64, r.random_range(-4..=4) as f64, r.random_range(-4..=4) as f64))
        .collect();
    PointCloud::new(pts).unwrap()
}

/// Neumaier-compensated sum.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

pub fn coords(cloud: &PointCloud<f64>) -> Vec<[f64; 3]> {
    cloud.iter().map(|p| [p.x, p.y, p.z]).collect()
}

pub fn oracle_centroid(cloud: &PointCloud<f64>) -> [f64; 3] {
    let pts = coords(cloud);
    let n = pts.len() as f64;
    [0, 1, 2].map(|a| compensated_sum(pts.iter().map(|p| p[a])) / n)
}

/// `Σ_j x_j x_jᵀ`, every entry summed independently.
pub fn oracle_second_moment(cloud: &PointCloud<f64>) -> [[f64; 3]; 3] {
    let pts = coords(cloud);
    let mut m = [[0.0; 3]; 3];
    for (a, row) in m.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = compensated_sum(pts.iter().map(|p| p[a] * p[b]));
        }
    }
    m
}

fn dist2(p: [f64; 3], q: [f64; 3]) -> f64 {
    (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)
}

/// Full sort of every other point by (distance, index).
pub fn oracle_knn(cloud: &PointCloud<f64>, k: usize) -> Vec<Vec<usize>> {
    let pts = coords(cloud);
    (0..pts.len())
        .map(|i| {
            let mut all: Vec<(f64, usize)> =
                (0..pts.len()).filter(|&j| j != i).map(|j| (dist2(pts[i], pts[j]), j)).collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            all.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect()
}

/// Farthest point sampling recomputing every min-distance from scratch.
pub fn oracle_fps(cloud: &PointCloud<f64>, m: usize, start: usize) -> Vec<usize> {
    let pts = coords(cloud);
    let mut chosen = vec![start];
    while chosen.len() < m {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for i in 0..pts.len() {
            if chosen.contains(&i) {
                continue;
            }
            let d = chosen.iter().map(|&c| dist2(pts[i], pts[c])).fold(f64::INFINITY, f64::min);
            if d > best.0 {
                best = (d, i);
            }
        }
        chosen.push(best.1);
    }
    chosen
}

/// Eigenvalues of a symmetric 3×3 matrix from its characteristic
/// polynomial (trigonometric cubic solution), descending.
pub fn oracle_eigenvalues(a: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(|x, y| y.total_cmp(x));
        return d;
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [e1, 3.0 * q - e1 - e3, e3]
}

/// Random proper rotation from a normalised quaternion, plus a translation.
pub fn random_rigid(r: &mut impl Rng) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut q = [0.0f64; 4];
    loop {
        for v in q.iter_mut() {
            *v = r.random_range(-1.0..1.0);
        }
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            q.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    let rot = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    let t = [r.random_range(-5.0..5.0), r.random_range(-5.0..5.0), r.random_range(-5.0..5.0)];
    (rot, t)
}

pub fn apply(rot: [[f64; 3]; 3], t: [f64; 3], cloud: &PointCloud<f64>) -> PointCloud<f64> {
    cloud
        .map(|p| {
            let v = [p.x, p.y, p.z];
            let row = |i: usize| rot[i][0] * v[0] + rot[i][1] * v[1] + rot[i][2] * v[2] + t[i];
            Point3::new(row(0), row(1), row(2))
        })
        .unwrap()
}

/// Central difference of `f` along coordinate `i` of `x`.
pub fn central_difference(f: &impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[i] += h;
    minus[i] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// Distance from `p` to triangle `abc` (closest-point by region tests).
pub fn point_triangle_distance(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let sub = |u: [f64; 3], v: [f64; 3]| [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
    let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let at = |s: f64, t: f64| [a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]), a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]), a[2] + s * (b[2] - a[2]) + t * (c[2] - a[2])];
    let (ab, ac, ap) = (sub(b, a), sub(c, a), sub(p, a));
    let (d1, d2) = (dot(ab, ap), dot(ac, ap));
    let closest = if d1 <= 0.0 && d2 <= 0.0 {
        a
    } else {
        let bp = sub(p, b);
        let (d3, d4) = (dot(ab, bp), dot(ac, bp));
        let cp = sub(p, c);
        let (d5, d6) = (dot(ab, cp), dot(ac, cp));
        let vc = d1 * d4 - d3 * d2;
        let vb = d5 * d2 - d1 * d6;
        let va = d3 * d6 - d5 * d4;
        if d3 >= 0.0 && d4 <= d3 {
            b
        } else if d6 >= 0.0 && d5 <= d6 {
            c
        } else if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
            at(d1 / (d1 - d3), 0.0)
        } else if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
            at(0.0, d2 / (d2 - d6))
        } else if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
            let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            [b[0] + w * (c[0] - b[0]), b[1] + w * (c[1] - b[1]), b[2] + w * (c[2] - b[2])]
        } else {
            let denom = 1.0 / (va + vb + vc);
            at(vb * denom, vc * denom)
        }
    };
    dot(sub(p, closest), sub(p, closest)).sqrt()
}
