//! Binary parameter checkpoints.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic    8 bytes  "CRGCNPRM"
//! version  u64      1
//! W1       u64 rows, u64 cols, rows·cols f64 (row-major)
//! W2       u64 rows, u64 cols, rows·cols f64 (row-major)
//! ```

use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::GcnParams;
use crate::{Error, Result, Scalar};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"CRGCNPRM";
pub const CHECKPOINT_VERSION: u64 = 1;

fn put_matrix<S: Scalar>(out: &mut Vec<u8>, m: &Array2<S>) {
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for v in m.iter() {
        out.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("truncated checkpoint".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn matrix<S: Scalar>(&mut self) -> Result<Array2<S>> {
        let rows = self.u64()? as usize;
        let cols = self.u64()? as usize;
        let count = rows
            .checked_mul(cols)
            .filter(|c| c.checked_mul(8).is_some_and(|b| b <= self.bytes.len()))
            .ok_or_else(|| Error::Format(format!("implausible matrix shape {rows}x{cols}")))?;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            let v = f64::from_le_bytes(self.take(8)?.try_into().unwrap());
            values.push(S::of(v));
        }
        Array2::from_shape_vec((rows, cols), values).map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn encode_checkpoint<S: Scalar>(params: &GcnParams<S>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    put_matrix(&mut out, &params.w1);
    put_matrix(&mut out, &params.w2);
    out
}

pub fn decode_checkpoint<S: Scalar>(bytes: &[u8]) -> Result<GcnParams<S>> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = cur.u64()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let w1 = cur.matrix()?;
    let w2 = cur.matrix()?;
    if cur.pos != bytes.len() {
        return Err(Error::Format("trailing bytes".into()));
    }
    if w1.ncols() != w2.nrows() {
        return Err(Error::Format("inconsistent hidden dimension".into()));
    }
    Ok(GcnParams { w1, w2 })
}

pub fn write_checkpoint<S: Scalar>(params: &GcnParams<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_checkpoint(params)).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint<S: Scalar>(path: impl AsRef<Path>) -> Result<GcnParams<S>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}
