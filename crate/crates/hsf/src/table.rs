//! Radial spectral densities read from a two-column text table.

use std::path::Path;

use hsf_core::density::{DensityExponents, FnDensity};

use crate::error::{Error, Result};

/// Samples `(r_i, f(r_i))` with strictly increasing positive radii and
/// positive values; interpolated linearly in `(log r, log f)` and extended
/// beyond both ends by the power law of the end segment.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTable {
    log_r: Vec<f64>,
    log_f: Vec<f64>,
}

impl RadialTable {
    /// Parse `r f` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut log_r = Vec::new();
        let mut log_f = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Config(format!("density table line {}: expected `r f`", no + 1));
            let mut it = line.split_whitespace();
            let r: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let f: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if it.next().is_some() || !(r > 0.0) || !(f > 0.0) || !r.is_finite() || !f.is_finite() {
                return Err(bad());
            }
            if log_r.last().is_some_and(|&p| r.ln() <= p) {
                return Err(Error::Config(format!(
                    "density table line {}: radii must increase strictly",
                    no + 1
                )));
            }
            log_r.push(r.ln());
            log_f.push(f.ln());
        }
        if log_r.len() < 2 {
            return Err(Error::Config("density table needs at least two rows".into()));
        }
        Ok(RadialTable { log_r, log_f })
    }

    /// Read a table file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// `f(r)` for `r > 0` (`+∞` at `r = 0`, following the end power law).
    pub fn eval(&self, r: f64) -> f64 {
        let x = r.ln();
        let n = self.log_r.len();
        let seg = match self.log_r.partition_point(|&p| p <= x) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        let (x0, x1) = (self.log_r[seg], self.log_r[seg + 1]);
        let (y0, y1) = (self.log_f[seg], self.log_f[seg + 1]);
        (y0 + (y1 - y0) * (x - x0) / (x1 - x0)).exp()
    }

    /// Density `ξ ↦ f(‖ξ‖)` in dimension `d` with declared exponents.
    pub fn into_density(self, a_prime: f64, a: Vec<f64>) -> Result<FnDensity> {
        let exps = DensityExponents { a_prime, a };
        let f = move |xi: &[f64]| self.eval(xi.iter().map(|x| x * x).sum::<f64>().sqrt());
        Ok(FnDensity::new(Box::new(f), exps)?)
    }
}
