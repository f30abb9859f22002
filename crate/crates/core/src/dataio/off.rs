//! OFF triangle meshes.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::scalar::Real;

/// Faces with area at or below this are dropped on load.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh<T> {
    pub vertices: Vec<Point3<T>>,
    pub faces: Vec<[usize; 3]>,
    /// Number of zero-area triangles discarded while building the mesh.
    pub dropped_degenerate: usize,
}

impl<T: Real> TriangleMesh<T> {
    /// Validates indices and drops degenerate triangles.
    pub fn new(vertices: Vec<Point3<T>>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        if let Some(f) = faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::Format(format!("face {f:?} references a vertex beyond {n}")));
        }
        let before = faces.len();
        let eps = T::lit(DEGENERATE_AREA);
        let faces: Vec<[usize; 3]> = faces
            .into_iter()
            .filter(|f| triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]) > eps)
            .collect();
        let dropped_degenerate = before - faces.len();
        Ok(TriangleMesh { vertices, faces, dropped_degenerate })
    }

    pub fn face_area(&self, f: usize) -> T {
        let [a, b, c] = self.faces[f];
        triangle_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn total_area(&self) -> T {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }
}

pub fn triangle_area<T: Real>(a: Point3<T>, b: Point3<T>, c: Point3<T>) -> T {
    (b - a).cross(c - a).norm() * T::lit(0.5)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_num<V: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<V> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} `{tok}`") })
}

/// Parses OFF text. Polygons with more than three vertices are split into a
/// triangle fan around their first vertex; `#` comments and blank lines are
/// ignored.
pub fn parse_off<T: Real>(text: &str) -> Result<TriangleMesh<T>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing OFF header".into() })?;
    if header[0] != "OFF" {
        return Err(Error::Parse { line: hline, msg: format!("expected `OFF` header, found `{}`", header[0]) });
    }
    // Counts may share the header line ("OFF 8 6 0") or follow it.
    let (cline, counts) = if header.len() > 1 {
        (hline, header[1..].to_vec())
    } else {
        lines.next().ok_or(Error::Parse { line: hline + 1, msg: "missing counts line".into() })?
    };
    if counts.len() < 2 {
        return Err(Error::Parse { line: cline, msg: "counts line needs vertex and face counts".into() });
    }
    let nv: usize = parse_num(counts[0], cline, "vertex count")?;
    let nf: usize = parse_num(counts[1], cline, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    let mut last_line = cline;
    for v in 0..nv {
        let Some((line, toks)) = lines.next() else {
            return Err(Error::Parse { line: last_line + 1, msg: format!("expected {nv} vertices, found {v}") });
        };
        last_line = line;
        if toks.len() < 3 {
            return Err(Error::Parse { line, msg: format!("vertex needs 3 coordinates, found {}", toks.len()) });
        }
        let c: f64 = parse_num(toks[0], line, "coordinate")?;
        let d: f64 = parse_num(toks[1], line, "coordinate")?;
        let e: f64 = parse_num(toks[2], line, "coordinate")?;
        let p = Point3::new(T::lit(c), T::lit(d), T::lit(e));
        if !p.is_finite() {
            return Err(Error::Parse { line, msg: "non-finite coordinate".into() });
        }
        vertices.push(p);
    }

    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let Some((line, toks)) = lines.next() else {
            return Err(Error::Parse { line: last_line + 1, msg: format!("expected {nf} faces, found {f}") });
        };
        last_line = line;
        let k: usize = parse_num(toks[0], line, "polygon size")?;
        if k < 3 {
            return Err(Error::Parse { line, msg: format!("polygon needs at least 3 vertices, found {k}") });
        }
        if toks.len() < k + 1 {
            return Err(Error::Parse { line, msg: format!("polygon declares {k} indices but has {}", toks.len() - 1) });
        }
        let mut idx = Vec::with_capacity(k);
        for t in &toks[1..=k] {
            let i: usize = parse_num(t, line, "vertex index")?;
            if i >= nv {
                return Err(Error::Parse { line, msg: format!("vertex index {i} out of range for {nv} vertices") });
            }
            idx.push(i);
        }
        for j in 1..k - 1 {
            faces.push([idx[0], idx[j], idx[j + 1]]);
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(Error::Parse { line, msg: "unexpected content after the declared faces".into() });
    }
    TriangleMesh::new(vertices, faces)
}

/// OFF text for a triangle mesh, with round-trip precision coordinates.
pub fn serialize_off<T: Real>(mesh: &TriangleMesh<T>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "OFF\n{} {} 0", mesh.vertices.len(), mesh.faces.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?} {:?}", v.x.to_f64_lossy(), v.y.to_f64_lossy(), v.z.to_f64_lossy());
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}
