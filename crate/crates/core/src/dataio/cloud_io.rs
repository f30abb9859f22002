//! Point-cloud files: `MPC1` binary and `x y z` text.
//!
//! Binary layout: the four bytes `MPC1`, a little-endian `u32` point count,
//! then `count` little-endian `f32` triples and nothing else.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};
use crate::scalar::Real;

pub const MPC1_MAGIC: &[u8; 4] = b"MPC1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudFormat {
    Mpc1,
    Xyz,
}

impl CloudFormat {
    /// `.xyz`/`.txt` are text; everything else is treated as `MPC1`.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("xyz") | Some("txt") => CloudFormat::Xyz,
            _ => CloudFormat::Mpc1,
        }
    }
}

pub fn encode_mpc1<T: Real>(cloud: &PointCloud<T>) -> Result<Vec<u8>> {
    let count = u32::try_from(cloud.len())
        .map_err(|_| Error::Format(format!("{} points do not fit a u32 count", cloud.len())))?;
    let mut out = Vec::with_capacity(8 + 12 * cloud.len());
    out.extend_from_slice(MPC1_MAGIC);
    out.extend_from_slice(&count.to_le_bytes());
    for p in cloud.iter() {
        for c in p.to_array() {
            let v = c.to_f32().ok_or(Error::NonFinite(0))?;
            if !v.is_finite() {
                return Err(Error::Format("coordinate overflows float32".into()));
            }
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_mpc1<T: Real>(bytes: &[u8]) -> Result<PointCloud<T>> {
    if bytes.len() < 4 || &bytes[..4] != MPC1_MAGIC {
        return Err(Error::BadMagic);
    }
    let count_bytes: [u8; 4] = bytes
        .get(4..8)
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| Error::Format("truncated point count".into()))?;
    let count = u32::from_le_bytes(count_bytes) as usize;
    let body = &bytes[8..];
    let expected = count.checked_mul(12).ok_or_else(|| Error::Format("point count overflows".into()))?;
    if body.len() < expected {
        return Err(Error::Format(format!("truncated: {count} points need {expected} bytes, found {}", body.len())));
    }
    if body.len() > expected {
        return Err(Error::Format(format!("{} trailing bytes after {count} points", body.len() - expected)));
    }
    let points = body
        .chunks_exact(12)
        .map(|c| {
            let f = |i: usize| T::lit(f32::from_le_bytes([c[i], c[i + 1], c[i + 2], c[i + 3]]) as f64);
            Point3::new(f(0), f(4), f(8))
        })
        .collect();
    PointCloud::new(points)
}

/// One `x y z` line per point, 9 significant digits each.
pub fn encode_xyz<T: Real>(cloud: &PointCloud<T>) -> String {
    let mut s = String::with_capacity(cloud.len() * 48);
    for p in cloud.iter() {
        let _ = writeln!(s, "{:.8e} {:.8e} {:.8e}", p.x.to_f64_lossy(), p.y.to_f64_lossy(), p.z.to_f64_lossy());
    }
    s
}

/// Blank lines are skipped; every other line must hold exactly three numbers.
pub fn decode_xyz<T: Real>(text: &str) -> Result<PointCloud<T>> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 3 {
            return Err(Error::Parse { line: i + 1, msg: format!("expected 3 coordinates, found {}", toks.len()) });
        }
        let mut c = [T::zero(); 3];
        for (slot, tok) in c.iter_mut().zip(&toks) {
            let v: f64 = tok.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("invalid number `{tok}`") })?;
            *slot = T::lit(v);
        }
        points.push(Point3::from_array(c));
    }
    PointCloud::new(points)
}

pub fn write_cloud<T: Real>(path: &Path, cloud: &PointCloud<T>) -> Result<()> {
    match CloudFormat::from_path(path) {
        CloudFormat::Mpc1 => fs::write(path, encode_mpc1(cloud)?)?,
        CloudFormat::Xyz => fs::write(path, encode_xyz(cloud))?,
    }
    Ok(())
}

pub fn read_cloud<T: Real>(path: &Path) -> Result<PointCloud<T>> {
    match CloudFormat::from_path(path) {
        CloudFormat::Mpc1 => decode_mpc1(&fs::read(path)?),
        CloudFormat::Xyz => decode_xyz(&fs::read_to_string(path)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PointCloud<f64> {
        PointCloud::from_rows(&[[0.1, -2.5, 3.25], [1e-7, 1.23456, -0.333]]).unwrap()
    }

    #[test]
    fn empty_input_is_bad_magic() {
        let err = decode_mpc1::<f64>(&[]).unwrap_err();
        assert_eq!(err.to_string(), "bad magic");
    }

    #[test]
    fn binary_layout() {
        let bytes = encode_mpc1(&sample()).unwrap();
        assert_eq!(&bytes[..4], b"MPC1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(bytes.len(), 8 + 24);
        assert_eq!(&bytes[8..12], &0.1f32.to_le_bytes());
    }

    #[test]
    fn binary_rejects_truncation_and_trailing() {
        let bytes = encode_mpc1(&sample()).unwrap();
        assert!(decode_mpc1::<f64>(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_mpc1::<f64>(&bytes[..6]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_mpc1::<f64>(&extra).is_err());
        // zero points is a valid header but not a valid cloud
        assert!(matches!(decode_mpc1::<f64>(b"MPC1\0\0\0\0"), Err(Error::EmptyCloud)));
    }

    #[test]
    fn text_format_and_errors() {
        let text = encode_xyz(&sample());
        let first = text.lines().next().unwrap();
        assert_eq!(first, "1.00000000e-1 -2.50000000e0 3.25000000e0");
        assert!(decode_xyz::<f64>("1 2 3\n4 5\n").is_err());
        assert!(decode_xyz::<f64>("1 2 3 4\n").is_err());
        assert!(decode_xyz::<f64>("1 2 z\n").is_err());
        let c: PointCloud<f64> = decode_xyz("\n1 2 3\n\n").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn files_by_extension() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["c.mpc", "c.xyz"] {
            let path = dir.path().join(name);
            write_cloud(&path, &sample()).unwrap();
            let back: PointCloud<f64> = read_cloud(&path).unwrap();
            for (a, b) in sample().iter().zip(back.iter()) {
                assert!((*a - *b).norm() < 1e-6);
            }
        }
    }
}
