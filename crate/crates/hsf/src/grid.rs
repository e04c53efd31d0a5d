//! `HSFG` grid files and their TOML sidecars.
//!
//! Layout (all little-endian):
//!
//! | bytes        | content                                   |
//! |--------------|-------------------------------------------|
//! | 4            | magic `HSFG`                              |
//! | 4            | format version (`u32`, currently 1)       |
//! | 4            | dimension `d` (`u32`)                     |
//! | 8·d          | counts per axis (`u64`)                   |
//! | 16·d         | `origin_l, step_l` per axis (`f64` pairs) |
//! | 8·Πcounts    | values, row-major, last axis fastest      |
//!
//! The sidecar `<name>.hsfg.toml` carries the realisation metadata.

use std::path::Path;

use hsf_core::lattice::Lattice;
use hsf_core::synth::{FieldRealization, RealizationMeta};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magic bytes.
pub const MAGIC: &[u8; 4] = b"HSFG";
/// Current format version.
pub const VERSION: u32 = 1;

/// Encode a lattice and its values.
pub fn encode(lattice: &Lattice, values: &[f64]) -> Result<Vec<u8>> {
    if values.len() != lattice.len() {
        return Err(Error::Format(format!(
            "{} values for a lattice of {} points",
            values.len(),
            lattice.len()
        )));
    }
    let d = lattice.dim();
    let mut out = Vec::with_capacity(12 + 24 * d + 8 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    for &c in &lattice.counts {
        out.extend_from_slice(&(c as u64).to_le_bytes());
    }
    for l in 0..d {
        out.extend_from_slice(&lattice.origin[l].to_le_bytes());
        out.extend_from_slice(&lattice.step[l].to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format("truncated file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Decode a grid file.
pub fn decode(buf: &[u8]) -> Result<(Lattice, Vec<f64>)> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let d = r.u32()? as usize;
    if d == 0 || d > hsf_core::MAX_DIM {
        return Err(Error::Format(format!("unsupported dimension {d}")));
    }
    let mut counts = Vec::with_capacity(d);
    for _ in 0..d {
        let c = usize::try_from(r.u64()?).map_err(|_| Error::Format("count overflow".into()))?;
        counts.push(c);
    }
    let mut origin = Vec::with_capacity(d);
    let mut step = Vec::with_capacity(d);
    for _ in 0..d {
        origin.push(r.f64()?);
        step.push(r.f64()?);
    }
    let n = counts
        .iter()
        .try_fold(1usize, |a, &c| a.checked_mul(c))
        .ok_or_else(|| Error::Format("point count overflow".into()))?;
    let data = r.take(n.checked_mul(8).ok_or_else(|| Error::Format("size overflow".into()))?)?;
    if r.pos != buf.len() {
        return Err(Error::Format("trailing bytes".into()));
    }
    let values = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let lattice = Lattice::new(origin, step, counts).map_err(|e| Error::Format(e.to_string()))?;
    Ok((lattice, values))
}

/// Shell-level sup of one retained scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSup {
    pub j: Vec<i32>,
    pub sup: f64,
}

/// Sidecar metadata of a grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub seed: u64,
    pub alpha: f64,
    /// Band `η`, absent for the full field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Vec<u8>>,
    pub b: Vec<u32>,
    pub j_abs_max: i32,
    pub k_margin: i64,
    pub level_tail: f64,
    pub table_tail: f64,
    pub per_level: Vec<LevelSup>,
}

impl Sidecar {
    /// Sidecar of a realisation.
    pub fn of(meta: &RealizationMeta, seed: u64) -> Self {
        Sidecar {
            format: "HSFG".into(),
            version: VERSION,
            seed,
            alpha: meta.alpha,
            band: meta.band.clone(),
            b: meta.b.clone(),
            j_abs_max: meta.plan.j_abs_max,
            k_margin: meta.plan.k_margin,
            level_tail: meta.tail.level_tail,
            table_tail: meta.tail.table_tail,
            per_level: meta
                .tail
                .per_level
                .iter()
                .map(|(j, s)| LevelSup { j: j.clone(), sup: *s })
                .collect(),
        }
    }

    /// TOML text.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Parse TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Path of the sidecar belonging to a grid file.
pub fn sidecar_path(grid: &Path) -> std::path::PathBuf {
    let mut s = grid.as_os_str().to_owned();
    s.push(".toml");
    s.into()
}

/// Read a grid file from disk.
pub fn read(path: &Path) -> Result<(Lattice, Vec<f64>)> {
    let buf = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&buf)
}

/// Read a grid file and its sidecar.
pub fn read_with_sidecar(path: &Path) -> Result<(Lattice, Vec<f64>, Sidecar)> {
    let (lattice, values) = read(path)?;
    let sp = sidecar_path(path);
    let text = std::fs::read_to_string(&sp).map_err(|e| Error::io(&sp, e))?;
    Ok((lattice, values, Sidecar::from_toml(&text)?))
}

/// Encoded grid and sidecar text of a realisation.
pub fn encode_realization(r: &FieldRealization, seed: u64) -> Result<(Vec<u8>, String)> {
    Ok((encode(&r.lattice, &r.values)?, Sidecar::of(&r.meta, seed).to_toml()?))
}
