//! Binary sketch format.
//!
//! ```text
//! magic      5 bytes  "SKIS1"
//! version    u8       1
//! kind       u8       0 = SKIS, 1 = RIS
//! model      u8       0 = IC, 1 = LT
//! n          u64
//! T          u64
//! entries    u64      Σ |R_j|
//! Gamma      f64      IEEE-754 binary64
//! graph_hash u64
//! gamma      n × f64
//! samples    T × (LEB128 length, length × u32 node ids)
//! ```
//!
//! All fixed-width fields are little-endian. The inverted index is rebuilt
//! on load.

use std::io::{self, Read, Write};

use super::{Sketch, SketchKind};
use crate::error::{Result, SkisError};
use crate::graph::DiffusionModel;
use crate::NodeId;

pub const MAGIC: &[u8; 5] = b"SKIS1";
pub const VERSION: u8 = 1;

impl Sketch {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION, self.kind.code(), self.model.code()])?;
        w.write_all(&(self.node_count() as u64).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&(self.total_entries() as u64).to_le_bytes())?;
        w.write_all(&self.gamma_total.to_bits().to_le_bytes())?;
        w.write_all(&self.graph_hash.to_le_bytes())?;
        for g in &self.gamma {
            w.write_all(&g.to_bits().to_le_bytes())?;
        }
        let mut buf = Vec::new();
        for sample in self.samples() {
            buf.clear();
            write_varint(&mut buf, sample.len() as u64);
            for &v in sample {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Sketch> {
        let mut magic = [0u8; 5];
        read_exact(&mut r, &mut magic)?;
        if &magic != MAGIC {
            return Err(SkisError::Format("bad magic".into()));
        }
        let mut tags = [0u8; 3];
        read_exact(&mut r, &mut tags)?;
        if tags[0] != VERSION {
            return Err(SkisError::Format(format!(
                "unsupported version {}",
                tags[0]
            )));
        }
        let kind = SketchKind::from_code(tags[1])
            .ok_or_else(|| SkisError::Format(format!("unknown kind tag {}", tags[1])))?;
        let model = DiffusionModel::from_code(tags[2])
            .ok_or_else(|| SkisError::Format(format!("unknown model tag {}", tags[2])))?;
        let n = read_u64(&mut r)? as usize;
        let t = read_u64(&mut r)? as usize;
        let total = read_u64(&mut r)? as usize;
        let gamma_total = f64::from_bits(read_u64(&mut r)?);
        let graph_hash = read_u64(&mut r)?;

        // Grow buffers as data arrives rather than trusting header sizes.
        let mut gamma = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            gamma.push(f64::from_bits(read_u64(&mut r)?));
        }
        let mut offsets = Vec::with_capacity(t.min(1 << 20) + 1);
        offsets.push(0usize);
        let mut entries: Vec<NodeId> = Vec::with_capacity(total.min(1 << 24));
        let mut word = [0u8; 4];
        for _ in 0..t {
            let len = read_varint(&mut r)? as usize;
            if entries.len() + len > total {
                return Err(SkisError::Format(
                    "samples exceed the declared entry count".into(),
                ));
            }
            for _ in 0..len {
                read_exact(&mut r, &mut word)?;
                entries.push(NodeId::from_le_bytes(word));
            }
            offsets.push(entries.len());
        }
        if entries.len() != total {
            return Err(SkisError::Format(format!(
                "declared {total} entries, found {}",
                entries.len()
            )));
        }
        let mut probe = [0u8; 1];
        if r.read(&mut probe)? != 0 {
            return Err(SkisError::Format(
                "trailing bytes after the last sample".into(),
            ));
        }
        let sketch = Sketch::from_parts(kind, model, offsets, entries, gamma, graph_hash)
            .map_err(|e| SkisError::Format(e.to_string()))?;
        if sketch.gamma_total.to_bits() != gamma_total.to_bits() {
            return Err(SkisError::Format(
                "Gamma does not match the stored per-node values".into(),
            ));
        }
        Ok(sketch)
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => SkisError::Format("truncated sketch".into()),
        _ => SkisError::Io(e),
    })
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn write_varint(out: &mut Vec<u8>, mut value: u64) {
    loop {
        let byte = (value & 0x7f) as u8;
        value >>= 7;
        if value == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

fn read_varint<R: Read>(r: &mut R) -> Result<u64> {
    let mut value = 0u64;
    let mut byte = [0u8; 1];
    for shift in (0..64).step_by(7) {
        read_exact(r, &mut byte)?;
        value |= u64::from(byte[0] & 0x7f) << shift;
        if byte[0] & 0x80 == 0 {
            return Ok(value);
        }
    }
    Err(SkisError::Format("varint longer than 64 bits".into()))
}
