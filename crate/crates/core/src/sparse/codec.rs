//! Little-endian binary encodings.
//!
//! Sparse 3-D tensor (`FSCT`):
//! ```text
//! "FSCT" | u8 order tag | u32 C | u32 H | u32 W | u64 node count
//! node count x (i32 index, f32 value)          -- sentinels included
//! u64 n | n x u64 matrix offsets
//! u64 n | n x u64 segment offsets
//! ```
//! Dense 3-D tensor (`FDT3`):
//! ```text
//! "FDT3" | u32 C | u32 H | u32 W | C*H*W x f32   -- channel-innermost layout
//! ```

use super::dense::{DenseTensor3, Dims3};
use super::node::Node;
use super::order::AxisOrder3;
use super::tensor3::SparseTensor3;
use crate::{Error, Result};

pub const SPARSE3_MAGIC: &[u8; 4] = b"FSCT";
pub const DENSE3_MAGIC: &[u8; 4] = b"FDT3";

/// Cursor over a byte slice; every read names what it was reading so that
/// truncation errors point at the offending record.
pub(crate) struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub(crate) fn new(buf: &'a [u8]) -> Self {
        ByteReader { buf, pos: 0 }
    }

    pub(crate) fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub(crate) fn take(&mut self, n: usize, context: &str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(Error::Truncated {
                context: context.to_string(),
            });
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub(crate) fn array<const N: usize>(&mut self, context: &str) -> Result<[u8; N]> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N, context)?);
        Ok(out)
    }

    pub(crate) fn u8(&mut self, context: &str) -> Result<u8> {
        Ok(self.array::<1>(context)?[0])
    }

    pub(crate) fn u32(&mut self, context: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array(context)?))
    }

    pub(crate) fn u64(&mut self, context: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array(context)?))
    }

    pub(crate) fn i32(&mut self, context: &str) -> Result<i32> {
        Ok(i32::from_le_bytes(self.array(context)?))
    }

    pub(crate) fn f32(&mut self, context: &str) -> Result<f32> {
        Ok(f32::from_le_bytes(self.array(context)?))
    }

    pub(crate) fn f32_vec(&mut self, n: usize, context: &str) -> Result<Vec<f32>> {
        let bytes = self.take(n.checked_mul(4).ok_or_else(|| Error::format("length overflow"))?, context)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect())
    }

    pub(crate) fn magic(&mut self, expected: &[u8; 4], context: &str) -> Result<()> {
        let found = self.array::<4>(context)?;
        if &found != expected {
            return Err(Error::BadMagic {
                context: context.to_string(),
                expected: String::from_utf8_lossy(expected).into_owned(),
                found: String::from_utf8_lossy(&found).into_owned(),
            });
        }
        Ok(())
    }
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn dim_u32(v: usize) -> u32 {
    u32::try_from(v).expect("tensor extent exceeds u32")
}

pub(crate) fn write_dense3(out: &mut Vec<u8>, t: &DenseTensor3) {
    let d = t.dims();
    out.extend_from_slice(DENSE3_MAGIC);
    put_u32(out, dim_u32(d.c));
    put_u32(out, dim_u32(d.h));
    put_u32(out, dim_u32(d.w));
    out.reserve(t.data().len() * 4);
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub(crate) fn read_dims(r: &mut ByteReader<'_>, context: &str) -> Result<Dims3> {
    let c = r.u32(context)? as usize;
    let h = r.u32(context)? as usize;
    let w = r.u32(context)? as usize;
    Ok(Dims3::new(c, h, w))
}

pub(crate) fn read_dense3(r: &mut ByteReader<'_>, context: &str) -> Result<DenseTensor3> {
    r.magic(DENSE3_MAGIC, context)?;
    let dims = read_dims(r, context)?;
    let data = r.f32_vec(dims.len(), context)?;
    DenseTensor3::from_vec(dims, data)
}

pub fn encode_dense3(t: &DenseTensor3) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + t.data().len() * 4);
    write_dense3(&mut out, t);
    out
}

pub fn decode_dense3(bytes: &[u8]) -> Result<DenseTensor3> {
    let mut r = ByteReader::new(bytes);
    let t = read_dense3(&mut r, "dense tensor")?;
    if r.remaining() != 0 {
        return Err(Error::format(format!("{} trailing bytes", r.remaining())));
    }
    Ok(t)
}

pub fn encode_sparse3(t: &SparseTensor3) -> Vec<u8> {
    let d = t.dims();
    let mut out = Vec::with_capacity(
        25 + t.nodes().len() * 8 + (t.matrix_offsets().len() + t.segment_offsets().len() + 2) * 8,
    );
    out.extend_from_slice(SPARSE3_MAGIC);
    out.push(t.order().tag());
    put_u32(&mut out, dim_u32(d.c));
    put_u32(&mut out, dim_u32(d.h));
    put_u32(&mut out, dim_u32(d.w));
    put_u64(&mut out, t.nodes().len() as u64);
    for n in t.nodes() {
        out.extend_from_slice(&n.index.to_le_bytes());
        out.extend_from_slice(&n.value.to_le_bytes());
    }
    for table in [t.matrix_offsets(), t.segment_offsets()] {
        put_u64(&mut out, table.len() as u64);
        for &o in table {
            put_u64(&mut out, o as u64);
        }
    }
    out
}

fn read_table(r: &mut ByteReader<'_>, context: &str) -> Result<Vec<usize>> {
    let n = r.u64(context)? as usize;
    if n > r.remaining() / 8 {
        return Err(Error::Truncated {
            context: context.to_string(),
        });
    }
    (0..n).map(|_| Ok(r.u64(context)? as usize)).collect()
}

/// Decodes and validates an `FSCT` buffer.
pub fn decode_sparse3(bytes: &[u8]) -> Result<SparseTensor3> {
    let mut r = ByteReader::new(bytes);
    r.magic(SPARSE3_MAGIC, "sparse tensor header")?;
    let order = AxisOrder3::from_tag(r.u8("sparse tensor header")?)?;
    let dims = read_dims(&mut r, "sparse tensor header")?;
    let count = r.u64("sparse tensor header")? as usize;
    if count > r.remaining() / 8 {
        return Err(Error::Truncated {
            context: "sparse tensor nodes".into(),
        });
    }
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let index = r.i32("sparse tensor nodes")?;
        let value = r.f32("sparse tensor nodes")?;
        nodes.push(Node::new(index, value));
    }
    let matrix_offsets = read_table(&mut r, "matrix offsets")?;
    let segment_offsets = read_table(&mut r, "segment offsets")?;
    if r.remaining() != 0 {
        return Err(Error::format(format!("{} trailing bytes", r.remaining())));
    }
    SparseTensor3::from_parts(order, dims, nodes, matrix_offsets, segment_offsets)
}
