//! Binary parameter checkpoints.
//!
//! Layout, all integers `u32` little-endian:
//!
//! ```text
//! "GTNT" version arch_tag L D F C
//! repeated until EOF:
//!   name_len name_bytes ndims dims[ndims] values[prod(dims)] (f32 LE)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Arch, ModelSpec, ParameterSet};
use crate::error::{Error, Result};
use crate::graph::Scheme;
use crate::tensor::Tensor;

pub const CHECKPOINT_VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"GTNT";

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub arch: Arch,
    pub hops: usize,
    pub in_dim: usize,
    pub hidden: usize,
    pub classes: usize,
    pub params: ParameterSet<f32>,
}

impl Checkpoint {
    pub fn new(spec: &ModelSpec, params: ParameterSet<f32>) -> Self {
        Self {
            arch: spec.arch,
            hops: spec.hops,
            in_dim: spec.in_dim,
            hidden: spec.hidden,
            classes: spec.classes,
            params,
        }
    }

    /// Model spec for inference; dropout is irrelevant there and set to 0.
    pub fn spec(&self, scheme: Scheme) -> ModelSpec {
        ModelSpec {
            arch: self.arch,
            hops: self.hops,
            in_dim: self.in_dim,
            hidden: self.hidden,
            classes: self.classes,
            dropout_input: 0.0,
            dropout_prop: 0.0,
            scheme,
        }
    }
}

fn put_u32(w: &mut impl Write, v: usize, what: &str) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Checkpoint(format!("{what} = {v} does not fit in u32")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

pub fn write_checkpoint(w: &mut impl Write, ckpt: &Checkpoint) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&ckpt.arch.tag().to_le_bytes())?;
    for (v, what) in [
        (ckpt.hops, "L"),
        (ckpt.in_dim, "D"),
        (ckpt.hidden, "F"),
        (ckpt.classes, "C"),
    ] {
        put_u32(w, v, what)?;
    }
    for (name, t) in ckpt.params.entries() {
        put_u32(w, name.len(), "name length")?;
        w.write_all(name.as_bytes())?;
        put_u32(w, 2, "ndims")?;
        put_u32(w, t.rows(), "rows")?;
        put_u32(w, t.cols(), "cols")?;
        for &x in t.data() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize, what: &str) -> Result<&[u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Checkpoint(format!("truncated while reading {what} at byte {}", self.pos)));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

pub fn read_checkpoint(r: &mut impl Read) -> Result<Checkpoint> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let mut c = Cursor { buf: &buf, pos: 0 };
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::Checkpoint("bad magic, not a checkpoint file".into()));
    }
    let version = c.u32("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
    }
    let arch = Arch::from_tag(c.u32("arch tag")?)?;
    let hops = c.u32("L")? as usize;
    let in_dim = c.u32("D")? as usize;
    let hidden = c.u32("F")? as usize;
    let classes = c.u32("C")? as usize;

    let mut entries = Vec::new();
    while !c.done() {
        let len = c.u32("name length")? as usize;
        let name = std::str::from_utf8(c.take(len, "name")?)
            .map_err(|_| Error::Checkpoint("array name is not UTF-8".into()))?
            .to_string();
        let ndims = c.u32("ndims")? as usize;
        let dims: Vec<usize> = (0..ndims).map(|_| c.u32("dims").map(|d| d as usize)).collect::<Result<_>>()?;
        let (rows, cols) = match dims[..] {
            [n] => (1, n),
            [r, k] => (r, k),
            _ => return Err(Error::Checkpoint(format!("{name}: {ndims}-d arrays are not supported"))),
        };
        let count = rows.checked_mul(cols).ok_or_else(|| Error::Checkpoint(format!("{name}: size overflow")))?;
        let bytes = c.take(count * 4, &name)?;
        let data = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
            .collect();
        entries.push((name, Tensor::new(rows, cols, data)?));
    }

    let spec = ModelSpec {
        arch,
        hops,
        in_dim,
        hidden,
        classes,
        dropout_input: 0.0,
        dropout_prop: 0.0,
        scheme: Scheme::Symmetric,
    };
    spec.validate().map_err(|e| Error::Checkpoint(format!("invalid header: {e}")))?;
    let params = ParameterSet::from_entries(&spec, entries).map_err(|e| Error::Checkpoint(e.to_string()))?;
    Ok(Checkpoint::new(&spec, params))
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_checkpoint(&mut w, ckpt)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    read_checkpoint(&mut BufReader::new(File::open(path)?))
}
