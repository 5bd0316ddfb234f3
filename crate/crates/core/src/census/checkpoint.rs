//! Resumable state of a values census.
//!
//! All integers little-endian:
//!
//! ```text
//! "APCS"                 4 bytes
//! version                u8 (= 1)
//! root                   4 × i64
//! T                      u64
//! circles_counted        u64
//! bitset word count      u64, then that many u64 words (bit k = curvature k)
//! frontier count         u64, then per node: 4 × i64 quadruple, u8 last slot (4 = none)
//! ```
//!
//! Files are written to a sibling temporary path and renamed into place.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use bitvec::prelude::*;

use super::Node;
use crate::descartes::Quadruple;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"APCS";
const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub root: Quadruple<i64>,
    pub bound: u64,
    pub circles_counted: u64,
    pub bits: BitVec<u64, Lsb0>,
    pub(crate) frontier: Vec<Node>,
}

impl Checkpoint {
    /// Unexplored subtrees remaining.
    pub fn pending(&self) -> usize {
        self.frontier.len()
    }
}

pub fn write_checkpoint(path: &Path, state: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION])?;
        for e in state.root.entries {
            w.write_all(&e.to_le_bytes())?;
        }
        w.write_all(&state.bound.to_le_bytes())?;
        w.write_all(&state.circles_counted.to_le_bytes())?;
        let raw = state.bits.as_raw_slice();
        w.write_all(&(raw.len() as u64).to_le_bytes())?;
        for word in raw {
            w.write_all(&word.to_le_bytes())?;
        }
        w.write_all(&(state.frontier.len() as u64).to_le_bytes())?;
        for n in &state.frontier {
            for e in n.q {
                w.write_all(&e.to_le_bytes())?;
            }
            w.write_all(&[n.last])?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn u64_at(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| bad("truncated file"))?;
    Ok(u64::from_le_bytes(b))
}

fn i64_at(r: &mut impl Read) -> Result<i64> {
    Ok(u64_at(r)? as i64)
}

fn u8_at(r: &mut impl Read) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b).map_err(|_| bad("truncated file"))?;
    Ok(b[0])
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| bad("truncated file"))?;
    if &magic != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u8_at(&mut r)?;
    if version != VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let mut root = [0i64; 4];
    for e in &mut root {
        *e = i64_at(&mut r)?;
    }
    let bound = u64_at(&mut r)?;
    let circles_counted = u64_at(&mut r)?;
    let words = u64_at(&mut r)?;
    if words != (bound + 1).div_ceil(64) {
        return Err(bad(format!("bitset has {words} words, bound {bound} needs {}", (bound + 1).div_ceil(64))));
    }
    let mut raw = Vec::with_capacity(words as usize);
    for _ in 0..words {
        raw.push(u64_at(&mut r)?);
    }
    let mut bits = BitVec::<u64, Lsb0>::from_vec(raw);
    bits.truncate(bound as usize + 1);
    let count = u64_at(&mut r)?;
    let mut frontier = Vec::new();
    for _ in 0..count {
        let mut q = [0i64; 4];
        for e in &mut q {
            *e = i64_at(&mut r)?;
        }
        let last = u8_at(&mut r)?;
        if last > 4 {
            return Err(bad(format!("frontier slot {last} out of range")));
        }
        frontier.push(Node { q, last });
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(bad("trailing bytes"));
    }
    Ok(Checkpoint {
        root: Quadruple::from_array(root),
        bound,
        circles_counted,
        bits,
        frontier,
    })
}
