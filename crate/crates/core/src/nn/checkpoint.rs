//! Binary parameter checkpoints.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! b"MMNT"  u16 version  u32 tensor_count
//! per tensor: u32 name_len  name (UTF-8)  u32 rank  u32 dims[rank]  f64 data[Π dims]
//! ```
//!
//! Values are always stored as `f64`; reading into `f32` rounds.

use std::io::{Read, Write};
use std::path::Path;

use super::params::ParamStore;
use super::tensor::Tensor;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"MMNT";
pub const CHECKPOINT_VERSION: u16 = 1;

fn u32_of(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::Format(format!("{what} {v} exceeds u32")))
}

pub fn encode_checkpoint<T: Real>(params: &ParamStore<T>) -> Result<Vec<u8>> {
    let mut buf = Vec::with_capacity(16 + params.numel() * 8);
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    buf.extend_from_slice(&u32_of(params.len(), "tensor count")?.to_le_bytes());
    for (name, t) in params.iter() {
        buf.extend_from_slice(&u32_of(name.len(), "name length")?.to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        buf.extend_from_slice(&u32_of(t.rank(), "rank")?.to_le_bytes());
        for &d in t.shape() {
            buf.extend_from_slice(&u32_of(d, "dimension")?.to_le_bytes());
        }
        for &v in t.data() {
            buf.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
    }
    Ok(buf)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(Error::Format(format!("truncated checkpoint at byte {}", self.pos)));
        };
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

pub fn decode_checkpoint<T: Real>(bytes: &[u8]) -> Result<ParamStore<T>> {
    let mut c = Cursor { bytes, pos: 0 };
    if bytes.len() < 4 || c.take(4)? != CHECKPOINT_MAGIC {
        return Err(Error::BadMagic);
    }
    let version = u16::from_le_bytes(c.take(2)?.try_into().expect("2 bytes"));
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let count = c.u32()?;
    let mut store = ParamStore::new();
    for _ in 0..count {
        let name_len = c.u32()? as usize;
        let name = std::str::from_utf8(c.take(name_len)?)
            .map_err(|e| Error::Format(format!("tensor name is not UTF-8: {e}")))?
            .to_string();
        let rank = c.u32()? as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(c.u32()? as usize);
        }
        let numel = shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        let numel = numel.ok_or_else(|| Error::Format(format!("tensor `{name}` is too large")))?;
        let raw = c.take(numel.checked_mul(8).ok_or_else(|| Error::Format("tensor too large".into()))?)?;
        let data = raw
            .chunks_exact(8)
            .map(|b| T::lit(f64::from_le_bytes(b.try_into().expect("8 bytes"))))
            .collect();
        store.insert(name, Tensor::new(shape, data)?);
    }
    if c.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes after checkpoint", bytes.len() - c.pos)));
    }
    Ok(store)
}

pub fn save_checkpoint<T: Real>(path: impl AsRef<Path>, params: &ParamStore<T>) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&encode_checkpoint(params)?)?;
    Ok(())
}

pub fn load_checkpoint<T: Real>(path: impl AsRef<Path>) -> Result<ParamStore<T>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode_checkpoint(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ParamStore<f64> {
        let mut p = ParamStore::new();
        p.insert("trunk.0.w", Tensor::matrix(2, 3, vec![1.5, -0.0, f64::MIN_POSITIVE, 3.25, 1e300, -7.0]).unwrap());
        p.insert("héad.b", Tensor::new(vec![4], vec![0.1, 0.2, 0.3, 0.4]).unwrap());
        p
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let p = sample();
        let bytes = encode_checkpoint(&p).unwrap();
        let q: ParamStore<f64> = decode_checkpoint(&bytes).unwrap();
        assert_eq!(encode_checkpoint(&q).unwrap(), bytes);
        for ((na, a), (nb, b)) in p.iter().zip(q.iter()) {
            assert_eq!(na, nb);
            assert_eq!(a.shape(), b.shape());
            assert!(a.data().iter().zip(b.data()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn rejects_bad_magic_truncation_and_trailing_bytes() {
        assert!(matches!(decode_checkpoint::<f64>(b""), Err(Error::BadMagic)));
        assert!(matches!(decode_checkpoint::<f64>(b"MPC1\x01\x00"), Err(Error::BadMagic)));
        let bytes = encode_checkpoint(&sample()).unwrap();
        assert!(decode_checkpoint::<f64>(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_checkpoint::<f64>(&extra).is_err());
    }

    #[test]
    fn header_layout() {
        let bytes = encode_checkpoint(&sample()).unwrap();
        assert_eq!(&bytes[..4], b"MMNT");
        assert_eq!(&bytes[4..6], &1u16.to_le_bytes());
        assert_eq!(&bytes[6..10], &2u32.to_le_bytes());
        assert_eq!(&bytes[10..14], &9u32.to_le_bytes());
        assert_eq!(&bytes[14..23], b"trunk.0.w");
    }
}
