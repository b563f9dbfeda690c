//! The `CAMW` weight blob.
//!
//! ```text
//! magic "CAMW" | version u32 = 1 | tensor_count u32
//! per tensor: name_len u32 | name utf-8 | rank u32 | dims u32 x rank | f32 x prod(dims)
//! ```
//!
//! All integers and floats are little-endian; records are packed with no
//! padding. Tensors are written in name order so encoding is deterministic.

use camlens_core::{Tensor, WeightStore};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CAMW";
pub const VERSION: u32 = 1;

pub fn encode_weights(store: &WeightStore) -> Vec<u8> {
    let payload: usize = store
        .iter()
        .map(|(n, t)| 8 + n.len() + 4 * t.rank() + 4 * t.len())
        .sum();
    let mut out = Vec::with_capacity(12 + payload);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(store.len() as u32).to_le_bytes());
    for (name, tensor) in store {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(tensor.rank() as u32).to_le_bytes());
        for &d in tensor.shape() {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for v in tensor.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_weights(bytes: &[u8]) -> Result<WeightStore> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Weights("bad magic, expected \"CAMW\"".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Weights(format!("unsupported version {version}")));
    }
    let count = r.u32()?;
    let mut store = WeightStore::new();
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| Error::Weights("tensor name is not UTF-8".into()))?
            .to_owned();
        let rank = r.u32()? as usize;
        if rank == 0 {
            return Err(Error::Weights(format!("tensor `{name}` has rank 0")));
        }
        let dims = (0..rank)
            .map(|_| r.u32().map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .filter(|&n| n.checked_mul(4).is_some_and(|b| b <= r.remaining()))
            .ok_or_else(|| Error::Weights(format!("tensor `{name}` data is truncated")))?;
        let data = r
            .take(len * 4)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let tensor =
            Tensor::new(dims, data).map_err(|e| Error::Weights(format!("tensor `{name}`: {e}")))?;
        if store.insert(name.clone(), tensor).is_some() {
            return Err(Error::Weights(format!("duplicate tensor `{name}`")));
        }
    }
    if r.remaining() != 0 {
        return Err(Error::Weights(format!(
            "{} trailing bytes after last tensor",
            r.remaining()
        )));
    }
    Ok(store)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(Error::Weights(format!(
                "unexpected end of data at byte {}",
                self.pos
            )));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}
