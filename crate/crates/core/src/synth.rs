//! Field synthesis from kernels and coefficients.
//!
//! ```text
//! X(t) = (2π)^{-d} Σ_{J,K} (Ψ_{α,J}(2^J t - K) - Ψ_{α,J}(-K)) ε_{α,J,K}
//! ```
//!
//! The factor `(2π)^{-d}` is the frame normalisation that goes with the
//! transform convention `ĝ(ξ) = ∫ e^{-iξ·x} g(x) dx`: with it,
//! `F(t,·) = (2π)^{-d} Σ s_{J,K}(t) conj ψ̂_{α,J,K}` and the series has the
//! law of the harmonizable field.  The building blocks `Φ_{α,J}` and
//! `Ψ_{α,J}` themselves are the raw integrals.
//!
//! The scale indices split into `2^d` frequency bands `ℤ^d_{(η)}`; for
//! `η ≠ 0` a band is computed as `Y^η(t) - Y^η(0)` with
//! `Y^η(t) = Σ_J Φ_{α,J}(2^J t)`, for `η = 0` term by term.  Summation is
//! lexicographic in `(η, J, K)` for every output point, so results do not
//! depend on how points are distributed over threads.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::density::{DensityExponents, SpectralDensity};
use crate::error::{check_dim, invalid, Error, Result};
use crate::kernel::{compute_s_jk, PsiTable, QuadratureSpec, TableSpec};
use crate::lattice::Lattice;
use crate::lepage::CoefficientSource;
use crate::math::{ceil, checked_exp2, exp, exp2, floor, ln, powf, sincos, PI, TAU};
use crate::quadrature::{GaussLegendre, Rule};
use crate::wavelet::{check_alpha, meyer_hat, LAMBDA_HI, LAMBDA_LO};
use crate::{Complex64, MAX_DIM};

/// A frequency band `η ∈ {0,1}^d`: `j_l ≥ 1` where `η_l = 1`, `j_l ≤ 0`
/// where `η_l = 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrequencyBand {
    eta: Vec<u8>,
}

impl FrequencyBand {
    /// Band from its indicator vector.
    pub fn new(eta: Vec<u8>) -> Result<Self> {
        if eta.is_empty() || eta.len() > MAX_DIM || eta.iter().any(|&e| e > 1) {
            return Err(invalid("band indicator must be a 0/1 vector of length 1..=3"));
        }
        Ok(FrequencyBand { eta })
    }

    /// All `2^d` bands in lexicographic order of `η`.
    pub fn all(d: usize) -> Vec<Self> {
        (0..1usize << d)
            .map(|c| FrequencyBand {
                eta: (0..d).map(|l| ((c >> (d - 1 - l)) & 1) as u8).collect(),
            })
            .collect()
    }

    /// The band containing `J`.
    pub fn of(j: &[i32]) -> Self {
        FrequencyBand { eta: j.iter().map(|&v| u8::from(v >= 1)).collect() }
    }

    /// Indicator vector.
    pub fn eta(&self) -> &[u8] {
        &self.eta
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    /// `η = 0`.
    pub fn is_low(&self) -> bool {
        self.eta.iter().all(|&e| e == 0)
    }

    /// Whether `J ∈ ℤ^d_{(η)}`.
    pub fn contains(&self, j: &[i32]) -> bool {
        j.len() == self.eta.len()
            && j.iter().zip(&self.eta).all(|(&v, &e)| (e == 1) == (v >= 1))
    }

    /// The truncated index set `{J ∈ ℤ^d_{(η)} : |j_l| ≤ j_max}`,
    /// lexicographically ordered.
    pub fn levels(&self, j_max: i32) -> Vec<Vec<i32>> {
        let ranges: Vec<(i32, i32)> =
            self.eta.iter().map(|&e| if e == 1 { (1, j_max) } else { (-j_max, 0) }).collect();
        product_i32(&ranges)
    }
}

fn product_i32(ranges: &[(i32, i32)]) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in ranges {
        let mut next = Vec::new();
        for p in &out {
            for v in lo..=hi {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Truncation of the double series.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationPlan {
    /// Scales kept: `|j_l| ≤ j_abs_max`.
    pub j_abs_max: i32,
    /// Translations kept: the integer box spanned by `2^J·(t_box ∪ {0})`,
    /// dilated by `k_margin` cells per side.
    pub k_margin: i64,
}

impl TruncationPlan {
    /// Defaults: `j_abs_max = 6` (d = 1), `4` (d ≥ 2); `k_margin = 12`.
    pub fn default_for(d: usize) -> Self {
        TruncationPlan { j_abs_max: if d <= 1 { 6 } else { 4 }, k_margin: 12 }
    }

    /// All retained `J`, lexicographic.
    pub fn levels(&self, d: usize) -> Vec<Vec<i32>> {
        product_i32(&vec![(-self.j_abs_max, self.j_abs_max); d])
    }

    /// Inclusive translation box for scale `J` and evaluation box `t_box`.
    pub fn k_box(&self, j: &[i32], t_box: &[[f64; 2]]) -> Result<(Vec<i64>, Vec<i64>)> {
        check_dim(j.len(), t_box.len())?;
        let mut lo = Vec::with_capacity(j.len());
        let mut hi = Vec::with_capacity(j.len());
        for (l, &jl) in j.iter().enumerate() {
            let s = checked_exp2(jl as f64)?;
            let a = floor(s * t_box[l][0].min(0.0));
            let b = ceil(s * t_box[l][1].max(0.0));
            if !(a.abs() < 1e15 && b.abs() < 1e15) {
                return Err(Error::Overflow { exponent: jl as f64 });
            }
            lo.push(a as i64 - self.k_margin);
            hi.push(b as i64 + self.k_margin);
        }
        Ok((lo, hi))
    }

    fn validate(&self) -> Result<()> {
        if self.j_abs_max < 0 || self.j_abs_max > 60 || self.k_margin < 0 {
            return Err(invalid("truncation plan needs 0 <= j_abs_max <= 60 and k_margin >= 0"));
        }
        Ok(())
    }
}

/// `(J, sup_t |contribution of scale J|)` pairs.
type LevelSups = Vec<(Vec<i32>, f64)>;

/// Per-run truncation diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TailReport {
    /// `sup_t |contribution of scale J|` for every retained `J`.
    pub per_level: Vec<(Vec<i32>, f64)>,
    /// Geometric extrapolation of the omitted scales from the two outermost
    /// retained shells `max_l |j_l| ∈ {j_abs_max - 1, j_abs_max}`
    /// (infinite when the shells do not decay).
    pub level_tail: f64,
    /// Largest relative kernel value on the boundary layer of any table.
    pub table_tail: f64,
}

/// Metadata of a realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationMeta {
    /// Stability index.
    pub alpha: f64,
    /// Band, or `None` for the full field.
    pub band: Option<Vec<u8>>,
    /// Derivative order.
    pub b: Vec<u32>,
    /// Truncation plan used.
    pub plan: TruncationPlan,
    /// Truncation diagnostics.
    pub tail: TailReport,
}

/// Field values on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    /// Evaluation lattice.
    pub lattice: Lattice,
    /// Row-major values.
    pub values: Vec<f64>,
    /// Metadata.
    pub meta: RealizationMeta,
}

/// Tables of `∂^b Ψ_{α,J}` for a set of scales.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBank {
    alpha: f64,
    b: Vec<u32>,
    exponents: DensityExponents,
    tables: BTreeMap<Vec<i32>, PsiTable>,
}

impl KernelBank {
    /// Tables for every `J` with `|j_l| ≤ j_abs_max`.
    pub fn for_plan(
        density: &dyn SpectralDensity,
        alpha: f64,
        b: &[u32],
        plan: &TruncationPlan,
    ) -> Result<Self> {
        let d = density.dim();
        Self::build(
            density,
            alpha,
            b,
            &plan.levels(d),
            &TableSpec::default_for(d),
            &QuadratureSpec::default_for(d),
        )
    }

    /// Tables for the listed scales.
    pub fn build(
        density: &dyn SpectralDensity,
        alpha: f64,
        b: &[u32],
        levels: &[Vec<i32>],
        spec: &TableSpec,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        check_dim(density.dim(), b.len())?;
        let build = |j: &Vec<i32>| PsiTable::build(density, alpha, j, b, spec, quad);
        #[cfg(feature = "parallel")]
        let built: Vec<Result<PsiTable>> = {
            use rayon::prelude::*;
            levels.par_iter().map(build).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let built: Vec<Result<PsiTable>> = levels.iter().map(build).collect();
        let mut tables = BTreeMap::new();
        for (j, t) in levels.iter().zip(built) {
            tables.insert(j.clone(), t?);
        }
        Ok(KernelBank { alpha, b: b.to_vec(), exponents: density.exponents().clone(), tables })
    }

    /// Stability index.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Derivative order of the tables.
    pub fn order(&self) -> &[u32] {
        &self.b
    }

    /// Table for `J`.
    pub fn table(&self, j: &[i32]) -> Result<&PsiTable> {
        self.tables
            .get(j)
            .ok_or_else(|| Error::Coverage(format!("no kernel table for scale {:?}", j)))
    }

    /// Largest boundary-layer ratio over all tables.
    pub fn table_tail(&self) -> f64 {
        self.tables.values().map(|t| t.tail_ratio).fold(0.0, f64::max)
    }
}

/// Coefficients of one scale on its translation box.
struct CoefficientBlock {
    lo: Vec<i64>,
    hi: Vec<i64>,
    values: Vec<f64>,
    /// `Ψ_J(-K)` on the same box (only for `b = 0`).
    centre: Vec<f64>,
}

impl CoefficientBlock {
    fn side(&self, l: usize) -> usize {
        (self.hi[l] - self.lo[l] + 1) as usize
    }
}

/// Iterate the box `[a, b]` (inclusive, sub-box of `blk`) in lexicographic
/// order, yielding (flat index in `blk`, K).
fn for_each_k(blk: &CoefficientBlock, a: &[i64], b: &[i64], mut g: impl FnMut(usize, &[i64])) {
    let d = a.len();
    if (0..d).any(|l| a[l] > b[l]) {
        return;
    }
    let mut k = [0i64; MAX_DIM];
    k[..d].copy_from_slice(a);
    loop {
        let mut flat = 0usize;
        for l in 0..d {
            flat = flat * blk.side(l) + (k[l] - blk.lo[l]) as usize;
        }
        g(flat, &k[..d]);
        let mut l = d;
        loop {
            if l == 0 {
                return;
            }
            l -= 1;
            k[l] += 1;
            if k[l] <= b[l] {
                break;
            }
            k[l] = a[l];
        }
    }
}

/// Synthesis engine: kernels, coefficients and a truncation plan.
pub struct Synthesizer<'a> {
    bank: &'a KernelBank,
    coefficients: &'a dyn CoefficientSource,
    plan: TruncationPlan,
}

impl<'a> Synthesizer<'a> {
    /// Combine the parts; the kernel bank must cover the plan.
    pub fn new(
        bank: &'a KernelBank,
        coefficients: &'a dyn CoefficientSource,
        plan: TruncationPlan,
    ) -> Result<Self> {
        plan.validate()?;
        check_dim(bank.b.len(), coefficients.dim())?;
        if (bank.alpha - coefficients.alpha()).abs() > 0.0 {
            return Err(invalid("kernel bank and coefficients use different alpha"));
        }
        let d = coefficients.dim();
        for j in plan.levels(d) {
            bank.table(&j)?;
            let t = bank.table(&j)?;
            t.require_coverage(0.0)?;
        }
        Ok(Synthesizer { bank, coefficients, plan })
    }

    /// Spatial dimension.
    pub fn dim(&self) -> usize {
        self.coefficients.dim()
    }

    /// Truncation plan.
    pub fn plan(&self) -> &TruncationPlan {
        &self.plan
    }

    fn block(&self, j: &[i32], t_box: &[[f64; 2]]) -> Result<CoefficientBlock> {
        let (lo, hi) = self.plan.k_box(j, t_box)?;
        let values = self.coefficients.coefficient_box(j, &lo, &hi)?;
        let table = self.bank.table(j)?;
        let mut blk = CoefficientBlock { lo, hi, values, centre: Vec::new() };
        if self.bank.b.iter().all(|&v| v == 0) {
            let mut centre = vec![0.0; blk.values.len()];
            let mut x = [0.0f64; MAX_DIM];
            let (a, b) = (blk.lo.clone(), blk.hi.clone());
            for_each_k(&blk, &a, &b, |flat, k| {
                for (l, kl) in k.iter().enumerate() {
                    x[l] = -(*kl as f64);
                }
                centre[flat] = table.eval(&x[..k.len()]);
            });
            blk.centre = centre;
        }
        Ok(blk)
    }

    /// `Σ_K Ψ(x - K) ε_K` over the block, restricted to the table window.
    fn phi_at(table: &PsiTable, blk: &CoefficientBlock, x: &[f64]) -> f64 {
        let d = x.len();
        let w = table.half_width;
        let mut a = [0i64; MAX_DIM];
        let mut b = [0i64; MAX_DIM];
        for l in 0..d {
            a[l] = blk.lo[l].max(ceil(x[l] - w) as i64);
            b[l] = blk.hi[l].min(floor(x[l] + w) as i64);
        }
        let mut acc = 0.0;
        let mut y = [0.0f64; MAX_DIM];
        for_each_k(blk, &a[..d], &b[..d], |flat, k| {
            for l in 0..d {
                y[l] = x[l] - k[l] as f64;
            }
            acc += table.eval(&y[..d]) * blk.values[flat];
        });
        acc
    }

    /// `Σ_K (Ψ(x - K) - Ψ(-K)) ε_K`, term by term.
    fn centred_at(table: &PsiTable, blk: &CoefficientBlock, x: &[f64]) -> f64 {
        let d = x.len();
        let w = table.half_width;
        let mut a = [0i64; MAX_DIM];
        let mut b = [0i64; MAX_DIM];
        for l in 0..d {
            a[l] = blk.lo[l].max(ceil(x[l].min(0.0) - w) as i64);
            b[l] = blk.hi[l].min(floor(x[l].max(0.0) + w) as i64);
        }
        let mut acc = 0.0;
        let mut y = [0.0f64; MAX_DIM];
        for_each_k(blk, &a[..d], &b[..d], |flat, k| {
            for l in 0..d {
                y[l] = x[l] - k[l] as f64;
            }
            acc += (table.eval(&y[..d]) - blk.centre[flat]) * blk.values[flat];
        });
        acc
    }

    /// `Φ_{α,J}(x) = Σ_K Ψ_{α,J}(x - K) ε_{α,J,K}` on a lattice of `x`
    /// values (no dilation), with `K` in the plan's box around the lattice.
    pub fn phi_alpha_j(&self, j: &[i32], x_lattice: &Lattice) -> Result<Vec<f64>> {
        let d = self.dim();
        check_dim(d, j.len())?;
        check_dim(d, x_lattice.dim())?;
        let table = self.bank.table(j)?;
        // K box: lattice bounds themselves (no dilation), plus the margin.
        let bounds = x_lattice.bounds();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for bd in &bounds {
            lo.push(floor(bd[0]) as i64 - self.plan.k_margin);
            hi.push(ceil(bd[1]) as i64 + self.plan.k_margin);
        }
        let values = self.coefficients.coefficient_box(j, &lo, &hi)?;
        let blk = CoefficientBlock { lo, hi, values, centre: Vec::new() };
        let mut x = [0.0f64; MAX_DIM];
        Ok((0..x_lattice.len())
            .map(|i| {
                x_lattice.point(i, &mut x[..d]);
                Self::phi_at(table, &blk, &x[..d])
            })
            .collect())
    }

    fn check_derivative(&self, band: Option<&FrequencyBand>) -> Result<()> {
        let b = &self.bank.b;
        let a = &self.bank.exponents.a;
        for l in 0..b.len() {
            let active = match band {
                Some(bd) => bd.eta[l] == 1,
                None => true,
            };
            if active && b[l] > 0 && !((b[l] as f64) < a[l]) {
                return Err(Error::Precondition(format!(
                    "differentiability not guaranteed: need eta_l * b_l < a_l, \
                     got b_{l} = {} with a_{l} = {}",
                    b[l], a[l]
                )));
            }
        }
        Ok(())
    }

    fn chain_factor(&self, j: &[i32]) -> Result<f64> {
        let e: i64 = j.iter().zip(&self.bank.b).map(|(&jl, &bl)| jl as i64 * bl as i64).sum();
        checked_exp2(e as f64)
    }

    /// Evaluate `∂^b X^η` for one band (with `b` the order of the bank).
    pub fn synthesize_band(
        &self,
        band: &FrequencyBand,
        lattice: &Lattice,
    ) -> Result<FieldRealization> {
        let d = self.dim();
        check_dim(d, band.dim())?;
        check_dim(d, lattice.dim())?;
        self.check_derivative(Some(band))?;
        let levels = band.levels(self.plan.j_abs_max);
        let (values, per_level) = self.band_values(band, &levels, lattice)?;
        Ok(self.realization(lattice, Some(band.eta.clone()), values, per_level))
    }

    fn band_values(
        &self,
        band: &FrequencyBand,
        levels: &[Vec<i32>],
        lattice: &Lattice,
    ) -> Result<(Vec<f64>, LevelSups)> {
        let d = self.dim();
        let t_box = lattice.bounds();
        let centred = self.bank.b.iter().all(|&v| v == 0);
        let mut blocks = Vec::with_capacity(levels.len());
        for j in levels {
            let s: Vec<f64> =
                j.iter().map(|&v| checked_exp2(v as f64)).collect::<Result<_>>()?;
            blocks.push((self.bank.table(j)?, self.block(j, &t_box)?, s, self.chain_factor(j)?));
        }
        let norm = powf(TAU, -(d as f64));
        // Y^η(0) for η ≠ 0 (undifferentiated only).
        let zero = [0.0f64; MAX_DIM];
        let y0: Vec<f64> = if centred && !band.is_low() {
            blocks.iter().map(|(t, blk, _, _)| Self::phi_at(t, blk, &zero[..d])).collect()
        } else {
            vec![0.0; blocks.len()]
        };
        let y0_total: f64 = y0.iter().sum();
        let low = band.is_low();
        let point = |i: usize, sup: &mut [f64]| -> f64 {
            let mut t = [0.0f64; MAX_DIM];
            let mut x = [0.0f64; MAX_DIM];
            lattice.point(i, &mut t[..d]);
            let mut acc = 0.0;
            for (n, (table, blk, s, chain)) in blocks.iter().enumerate() {
                for l in 0..d {
                    x[l] = s[l] * t[l];
                }
                let (term, contrib) = if centred && low {
                    let v = Self::centred_at(table, blk, &x[..d]);
                    (v, v)
                } else {
                    let v = Self::phi_at(table, blk, &x[..d]) * chain;
                    (v, v - y0[n])
                };
                acc += term;
                sup[n] = sup[n].max((contrib * norm).abs());
            }
            if centred && !low {
                acc -= y0_total;
            }
            acc * norm
        };
        let nb = blocks.len();
        let n = lattice.len();
        #[cfg(feature = "parallel")]
        let (values, sup) = {
            use rayon::prelude::*;
            let chunk = 64usize;
            let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..n.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let mut sup = vec![0.0; nb];
                    let vals: Vec<f64> =
                        (c * chunk..((c + 1) * chunk).min(n)).map(|i| point(i, &mut sup)).collect();
                    (vals, sup)
                })
                .collect();
            let mut values = Vec::with_capacity(n);
            let mut sup = vec![0.0f64; nb];
            for (v, s) in parts {
                values.extend(v);
                for (a, b) in sup.iter_mut().zip(s) {
                    *a = a.max(b);
                }
            }
            (values, sup)
        };
        #[cfg(not(feature = "parallel"))]
        let (values, sup) = {
            let mut sup = vec![0.0; nb];
            let values: Vec<f64> = (0..n).map(|i| point(i, &mut sup)).collect();
            (values, sup)
        };
        Ok((values, levels.iter().cloned().zip(sup).collect()))
    }

    fn realization(
        &self,
        lattice: &Lattice,
        band: Option<Vec<u8>>,
        values: Vec<f64>,
        mut per_level: Vec<(Vec<i32>, f64)>,
    ) -> FieldRealization {
        per_level.sort_by(|a, b| a.0.cmp(&b.0));
        let level_tail = level_tail(&per_level, self.plan.j_abs_max);
        FieldRealization {
            lattice: lattice.clone(),
            values,
            meta: RealizationMeta {
                alpha: self.bank.alpha,
                band,
                b: self.bank.b.clone(),
                plan: self.plan.clone(),
                tail: TailReport { per_level, level_tail, table_tail: self.bank.table_tail() },
            },
        }
    }

    /// `∂^b X = Σ_η ∂^b X^η`, bands summed in lexicographic order of `η`.
    pub fn synthesize_full(&self, lattice: &Lattice) -> Result<FieldRealization> {
        let d = self.dim();
        check_dim(d, lattice.dim())?;
        self.check_derivative(None)?;
        let mut values = vec![0.0; lattice.len()];
        let mut per_level = Vec::new();
        for band in FrequencyBand::all(d) {
            let levels = band.levels(self.plan.j_abs_max);
            let (v, p) = self.band_values(&band, &levels, lattice)?;
            for (a, b) in values.iter_mut().zip(v) {
                *a += b;
            }
            per_level.extend(p);
        }
        Ok(self.realization(lattice, None, values, per_level))
    }

    /// Term-by-term partial derivative field (order = the bank's `b`) of one
    /// band or of the full field.
    pub fn derivative_field(
        &self,
        band: Option<&FrequencyBand>,
        lattice: &Lattice,
    ) -> Result<FieldRealization> {
        match band {
            Some(b) => self.synthesize_band(b, lattice),
            None => self.synthesize_full(lattice),
        }
    }

    /// Independent evaluation of the full truncated series: one loop over
    /// all retained `J` in lexicographic order, every term centred
    /// individually, without the band grouping.
    pub fn synthesize_direct(&self, lattice: &Lattice) -> Result<Vec<f64>> {
        let d = self.dim();
        check_dim(d, lattice.dim())?;
        if self.bank.b.iter().any(|&v| v != 0) {
            return Err(invalid("direct synthesis is defined for the field itself (b = 0)"));
        }
        let t_box = lattice.bounds();
        let mut blocks = Vec::new();
        for j in self.plan.levels(d) {
            let s: Vec<f64> =
                j.iter().map(|&v| checked_exp2(v as f64)).collect::<Result<_>>()?;
            blocks.push((self.bank.table(&j)?, self.block(&j, &t_box)?, s));
        }
        let norm = powf(TAU, -(d as f64));
        let mut t = [0.0f64; MAX_DIM];
        let mut x = [0.0f64; MAX_DIM];
        Ok((0..lattice.len())
            .map(|i| {
                lattice.point(i, &mut t[..d]);
                let mut acc = 0.0;
                for (table, blk, s) in &blocks {
                    for l in 0..d {
                        x[l] = s[l] * t[l];
                    }
                    acc += Self::centred_at(table, blk, &x[..d]);
                }
                acc * norm
            })
            .collect())
    }
}

fn level_tail(per_level: &[(Vec<i32>, f64)], j_max: i32) -> f64 {
    if j_max < 1 {
        return f64::INFINITY;
    }
    let shell = |r: i32| -> f64 {
        per_level
            .iter()
            .filter(|(j, _)| j.iter().map(|v| v.abs()).max() == Some(r))
            .map(|(_, s)| *s)
            .sum()
    };
    let last = shell(j_max);
    let prev = shell(j_max - 1);
    if last == 0.0 {
        return 0.0;
    }
    let r = last / prev;
    if !(r < 1.0) {
        return f64::INFINITY;
    }
    last * r / (1.0 - r)
}

/// Description of the `Δ_α` distance used by [`frame_reconstruction_error`].
pub fn delta_alpha_metric(alpha: f64) -> &'static str {
    if alpha < 1.0 {
        "integral of |F - G|^alpha (quasi-norm metric)"
    } else {
        "L^alpha norm of F - G"
    }
}

/// `Δ_α(F(t,·), Σ_{D_n} s_{J,K}(t) conj ψ̂_{α,J,K})` for `n = 1..=n_levels`
/// with `D_n = {|j| ≤ n, |k| ≤ c·2^n}` (one dimension).
///
/// The coefficients `s_{J,K}(t)` are evaluated from their defining integral;
/// the distance is integrated over `2^{-n+1}π/3 ≤ |ξ| ≤ 2^{n+3}π/3`, where
/// the partial sum lives, plus `∫|F|^α` over the remaining frequencies.
pub fn frame_reconstruction_error(
    density: &dyn SpectralDensity,
    alpha: f64,
    t: f64,
    n_levels: u32,
    c: f64,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if density.dim() != 1 {
        return Err(invalid("frame reconstruction error is implemented for d = 1"));
    }
    if n_levels == 0 || n_levels > 12 || !(c > 0.0) {
        return Err(invalid("need 1 <= n_levels <= 12 and c > 0"));
    }
    let quad = QuadratureSpec::default_for(1);
    let f_of = |xi: f64| -> Complex64 {
        let (s, cs) = sincos(t * xi);
        Complex64::new(cs - 1.0, s) * density.eval(&[xi])
    };
    let base = GaussLegendre::new(24);
    let mut out = Vec::with_capacity(n_levels as usize);
    for n in 1..=n_levels as i32 {
        let kmax = floor(c * exp2(n as f64)) as i64;
        // Coefficients.
        let mut coeffs: BTreeMap<i32, Vec<f64>> = BTreeMap::new();
        for j in -n..=n {
            let row: Vec<f64> = (-kmax..=kmax)
                .map(|k| compute_s_jk(density, &[j], &[k], &[t], &quad))
                .collect::<Result<_>>()?;
            coeffs.insert(j, row);
        }
        // ∫ over ξ > 0, doubled (F - G is Hermitian).
        let lo = exp2((1 - n) as f64) * PI / 3.0;
        let hi = exp2((n + 3) as f64) * PI / 3.0;
        let mut inner = 0.0;
        // Segments between consecutive band edges 2^m·2π/3.
        let mut edges = Vec::new();
        let mut e = lo;
        while e < hi * (1.0 + 1e-12) {
            edges.push(e);
            e *= 2.0;
        }
        // Oscillation: e^{-ikλ} with |k| ≤ kmax over λ-intervals of length ≤ 2π.
        let panels = (ceil(kmax as f64 * TAU / 6.0) as usize).max(4);
        for w in edges.windows(2) {
            let rule = Rule::composite(w[0], w[1], panels, &base);
            for (&xi, &wt) in rule.x.iter().zip(&rule.w) {
                let mut g = Complex64::new(0.0, 0.0);
                for j in -n..=n {
                    let s = exp2(j as f64);
                    let lam = xi / s;
                    if !(LAMBDA_LO..=LAMBDA_HI).contains(&lam) {
                        continue;
                    }
                    // conj ψ̂_{2,j,k}(ξ) = 2^{-j/2} e^{ikλ} conj ψ̂¹(λ)
                    let prof = meyer_hat(lam).conj() * exp2(-0.5 * j as f64);
                    let row = &coeffs[&j];
                    let (sn, cs) = sincos(lam);
                    let step = Complex64::new(cs, sn);
                    let (sn, cs) = sincos(-(kmax as f64) * lam);
                    let mut ph = Complex64::new(cs, sn);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, sv) in row.iter().enumerate() {
                        if m % 32 == 0 {
                            let (sn, cs) = sincos((m as i64 - kmax) as f64 * lam);
                            ph = Complex64::new(cs, sn);
                        }
                        acc += ph * *sv;
                        ph *= step;
                    }
                    g += acc * prof;
                }
                g /= TAU;
                inner += wt * powf((f_of(xi) - g).norm(), alpha);
            }
        }
        // Outside the covered frequencies the partial sum vanishes.
        let outer_lo = log_integral(&|xi| powf(f_of(xi).norm(), alpha), lo * 1e-12, lo, &base);
        let outer_hi = log_integral(&|xi| powf(f_of(xi).norm(), alpha), hi, hi * 1e8, &base);
        let total = 2.0 * (inner + outer_lo + outer_hi);
        if !total.is_finite() {
            return Err(Error::NoConvergence(String::from("frame error quadrature failed")));
        }
        out.push(if alpha < 1.0 { total } else { powf(total, 1.0 / alpha) });
    }
    Ok(out)
}

/// `∫_a^b g` via the substitution `ξ = e^s`, one panel per unit of `s`.
fn log_integral(g: &dyn Fn(f64) -> f64, a: f64, b: f64, base: &GaussLegendre) -> f64 {
    let (sa, sb) = (ln(a), ln(b));
    let panels = (ceil((sb - sa) * 2.0) as usize).max(1);
    let rule = Rule::composite(sa, sb, panels, base);
    rule.x.iter().zip(&rule.w).map(|(&s, &w)| {
        let xi = exp(s);
        w * xi * g(xi)
    }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands_partition_levels() {
        let plan = TruncationPlan::default_for(2);
        let mut all: Vec<Vec<i32>> =
            FrequencyBand::all(2).iter().flat_map(|b| b.levels(plan.j_abs_max)).collect();
        all.sort();
        assert_eq!(all, plan.levels(2));
        for b in FrequencyBand::all(2) {
            for j in b.levels(3) {
                assert_eq!(FrequencyBand::of(&j), b);
            }
        }
    }

    #[test]
    fn k_box_contains_origin_image() {
        let plan = TruncationPlan { j_abs_max: 3, k_margin: 2 };
        let (lo, hi) = plan.k_box(&[2], &[[0.5, 1.0]]).unwrap();
        assert_eq!((lo[0], hi[0]), (-2, 6));
    }
}
