//! Configuration-driven runner for `hsf-core`: TOML run files, `HSFG` grid
//! files with TOML sidecars, structured-text reports, plot data and a
//! checksummed manifest.

#![forbid(unsafe_code)]

pub mod checks;
pub mod config;
pub mod error;
pub mod grid;
pub mod ks;
pub mod output;
pub mod runner;
pub mod table;

pub use config::{Command, RunConfig};
pub use error::{Error, Result};
pub use runner::{execute, Outcome};
