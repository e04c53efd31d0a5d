//! Artifact directory, structured-text reports, plot data and the manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        write!(s, "{b:02x}").unwrap();
    }
    s
}

/// One file written by a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Artifact {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Status of one executed command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandStatus {
    pub name: String,
    /// `ok` or `failed`.
    pub status: String,
    /// Random streams (LePage, Gaussian or sampling generators) constructed.
    pub rng_streams: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// Run-level provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunInfo {
    pub hsf_version: String,
    pub core_version: String,
    pub seed: u64,
    pub alpha: f64,
    pub d: usize,
    /// Checksum of the canonical configuration.
    pub config_sha256: String,
}

/// `manifest.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub run: RunInfo,
    #[serde(default)]
    pub command: Vec<CommandStatus>,
    #[serde(default)]
    pub artifact: Vec<Artifact>,
}

impl Manifest {
    /// Parse a manifest.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    /// Whether every command succeeded.
    pub fn all_ok(&self) -> bool {
        self.command.iter().all(|c| c.status == "ok")
    }
}

/// Writes files below the output directory and records their checksums.
#[derive(Debug)]
pub struct ArtifactWriter {
    root: PathBuf,
    artifacts: Vec<Artifact>,
}

impl ArtifactWriter {
    /// Create (if needed) the output directory.
    pub fn new(root: &Path) -> Result<Self> {
        std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(ArtifactWriter { root: root.to_path_buf(), artifacts: Vec::new() })
    }

    /// Output directory.
    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Write `bytes` to `rel` and record it.
    pub fn write(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.artifacts.push(Artifact {
            path: rel.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Write a structured-text report.
    pub fn write_report(&mut self, rel: &str, report: &toml::Table) -> Result<()> {
        let text = toml::to_string(report).map_err(|e| Error::Format(e.to_string()))?;
        self.write(rel, text.as_bytes())
    }

    /// Write a plain numeric plot file: one row per `(x, y...)` tuple.
    pub fn write_dat(&mut self, rel: &str, header: &str, rows: &[Vec<f64>]) -> Result<()> {
        let mut s = format!("# {header}\n");
        for r in rows {
            let line: Vec<String> = r.iter().map(|v| format!("{v:.17e}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        self.write(rel, s.as_bytes())
    }

    /// Recorded artifacts, in write order.
    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    /// Write `manifest.toml` (not itself listed).
    pub fn finish(self, run: RunInfo, command: Vec<CommandStatus>) -> Result<Manifest> {
        let manifest = Manifest { run, command, artifact: self.artifacts };
        let text = toml::to_string(&manifest).map_err(|e| Error::Format(e.to_string()))?;
        let path = self.root.join("manifest.toml");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(manifest)
    }
}

/// Small helpers for building report tables.
pub mod value {
    use toml::Value;

    pub fn f(x: f64) -> Value {
        Value::Float(x)
    }

    pub fn i(x: i64) -> Value {
        Value::Integer(x)
    }

    pub fn b(x: bool) -> Value {
        Value::Boolean(x)
    }

    pub fn s(x: impl Into<String>) -> Value {
        Value::String(x.into())
    }

    pub fn fs(xs: &[f64]) -> Value {
        Value::Array(xs.iter().map(|&x| f(x)).collect())
    }

    pub fn is<T: Copy + Into<i64>>(xs: &[T]) -> Value {
        Value::Array(xs.iter().map(|&x| i(x.into())).collect())
    }

    pub fn table(entries: Vec<(&str, Value)>) -> toml::Table {
        entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }
}
