//! Regular rectangular lattices with row-major storage (last axis fastest).

use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Result};
use crate::MAX_DIM;

/// Points `origin + i ⊙ step`, `0 ≤ i_l < counts_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    /// Coordinates of the first point.
    pub origin: Vec<f64>,
    /// Spacing per axis (positive).
    pub step: Vec<f64>,
    /// Number of points per axis.
    pub counts: Vec<usize>,
}

impl Lattice {
    /// Validated lattice.
    pub fn new(origin: Vec<f64>, step: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let d = origin.len();
        check_dim(d, step.len())?;
        check_dim(d, counts.len())?;
        if d == 0 || d > MAX_DIM {
            return Err(invalid("lattice dimension must be 1, 2 or 3"));
        }
        if step.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(invalid("lattice steps must be positive"));
        }
        if origin.iter().any(|o| !o.is_finite()) || counts.contains(&0) {
            return Err(invalid("lattice origin must be finite and counts positive"));
        }
        Ok(Lattice { origin, step, counts })
    }

    /// Symmetric lattice covering `[-half, half]^d` with `2n+1` points per axis.
    pub fn symmetric(d: usize, half: f64, n: usize) -> Result<Self> {
        if !(half > 0.0) || n == 0 {
            return Err(invalid("symmetric lattice needs half > 0 and n > 0"));
        }
        let step = half / n as f64;
        Lattice::new(alloc::vec![-half; d], alloc::vec![step; d], alloc::vec![2 * n + 1; d])
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    /// Total number of points.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    /// Whether the lattice is empty (never, once validated).
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of flat index `i`.
    pub fn multi_index(&self, mut i: usize, out: &mut [usize]) {
        for l in (0..self.dim()).rev() {
            out[l] = i % self.counts[l];
            i /= self.counts[l];
        }
    }

    /// Flat index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for l in 0..self.dim() {
            f = f * self.counts[l] + idx[l];
        }
        f
    }

    /// Coordinates of point `i`.
    pub fn point(&self, i: usize, out: &mut [f64]) {
        let mut idx = [0usize; MAX_DIM];
        self.multi_index(i, &mut idx[..self.dim()]);
        for l in 0..self.dim() {
            out[l] = self.origin[l] + idx[l] as f64 * self.step[l];
        }
    }

    /// Axis-aligned bounding box `[lo, hi]` per axis.
    pub fn bounds(&self) -> Vec<[f64; 2]> {
        (0..self.dim())
            .map(|l| {
                let hi = self.origin[l] + (self.counts[l] - 1) as f64 * self.step[l];
                [self.origin[l], hi]
            })
            .collect()
    }
}
