//! Increment operators, logarithmic rate functions and empirical
//! regularity scans.
//!
//! All operators act on lattice samples with lattice-aligned shifts; the
//! output lives on the sub-lattice where every shifted point is available.
//! Scans report, for each dyadic level, the supremum of the increment divided
//! by its theoretical modulus, averaged over realisations, and a trend verdict.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Error, Result};
use crate::lattice::Lattice;
use crate::math::{ceil, exp2, floor, ln, powf, round, sqrt};
use crate::synth::FieldRealization;
use crate::MAX_DIM;

/// Values on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    /// Lattice.
    pub lattice: Lattice,
    /// Row-major values.
    pub values: Vec<f64>,
}

impl LatticeFunction {
    /// Pair a lattice with values.
    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::DimensionMismatch { expected: lattice.len(), got: values.len() });
        }
        Ok(LatticeFunction { lattice, values })
    }

    /// Sample `g` on `lattice`.
    pub fn sample(lattice: Lattice, g: impl Fn(&[f64]) -> f64) -> Self {
        let d = lattice.dim();
        let mut x = [0.0f64; MAX_DIM];
        let values = (0..lattice.len())
            .map(|i| {
                lattice.point(i, &mut x[..d]);
                g(&x[..d])
            })
            .collect();
        LatticeFunction { lattice, values }
    }

    /// From a realisation.
    pub fn from_realization(r: &FieldRealization) -> Self {
        LatticeFunction { lattice: r.lattice.clone(), values: r.values.clone() }
    }

    fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Restriction to the sub-box starting at cell `offset` with `counts`
    /// points per axis.
    pub fn window(&self, offset: &[usize], counts: &[usize]) -> Result<Self> {
        let d = self.dim();
        check_dim(d, offset.len())?;
        check_dim(d, counts.len())?;
        for l in 0..d {
            if counts[l] == 0 || offset[l] + counts[l] > self.lattice.counts[l] {
                return Err(Error::Lattice(format!(
                    "window [{}, {}) exceeds {} points on axis {l}",
                    offset[l],
                    offset[l] + counts[l],
                    self.lattice.counts[l]
                )));
            }
        }
        let origin: Vec<f64> = (0..d)
            .map(|l| self.lattice.origin[l] + offset[l] as f64 * self.lattice.step[l])
            .collect();
        let lat = Lattice::new(origin, self.lattice.step.clone(), counts.to_vec())?;
        let mut idx = [0usize; MAX_DIM];
        let values = (0..lat.len())
            .map(|i| {
                lat.multi_index(i, &mut idx[..d]);
                for l in 0..d {
                    idx[l] += offset[l];
                }
                self.values[self.lattice.flat_index(&idx[..d])]
            })
            .collect();
        Ok(LatticeFunction { lattice: lat, values })
    }

    /// `Θ_r g = g(· + r)` for a lattice-aligned `r = shift ⊙ step`, on the
    /// sub-lattice where the shifted points exist.
    pub fn translate(&self, shift: &[usize]) -> Result<Self> {
        let counts: Vec<usize> = self
            .lattice
            .counts
            .iter()
            .zip(shift)
            .map(|(c, s)| c.checked_sub(*s).unwrap_or(0))
            .collect();
        let shifted = self.window(shift, &counts)?;
        // The result is indexed by x, not x + r.
        Ok(LatticeFunction {
            lattice: Lattice::new(
                self.lattice.origin.clone(),
                self.lattice.step.clone(),
                shifted.lattice.counts.clone(),
            )?,
            values: shifted.values,
        })
    }

    /// Sup norm over the points within `[-t, t]^d`.
    pub fn sup_on_cube(&self, t: f64) -> f64 {
        let d = self.dim();
        let mut x = [0.0f64; MAX_DIM];
        let tol = 1e-9 * t.max(1.0);
        let mut sup = 0.0f64;
        for (i, v) in self.values.iter().enumerate() {
            self.lattice.point(i, &mut x[..d]);
            if x[..d].iter().all(|c| c.abs() <= t + tol) {
                sup = sup.max(v.abs());
            }
        }
        sup
    }
}

/// `(Δ^k_{h_k} g)(x) = g(x + h_k e_k) - g(x)` with `h_k = shift · step_k`.
pub fn delta_axis(g: &LatticeFunction, axis: usize, shift: usize) -> Result<LatticeFunction> {
    let d = g.dim();
    if axis >= d {
        return Err(invalid(format!("axis {axis} out of range for dimension {d}")));
    }
    if shift == 0 {
        return Err(invalid("shift must be a positive number of cells"));
    }
    let n = g.lattice.counts[axis];
    if shift >= n {
        return Err(Error::Lattice(format!(
            "lattice too small: {n} points on axis {axis} for a shift of {shift} cells"
        )));
    }
    let mut counts = g.lattice.counts.clone();
    counts[axis] = n - shift;
    let lat = Lattice::new(g.lattice.origin.clone(), g.lattice.step.clone(), counts)?;
    let inner: usize = g.lattice.counts[axis + 1..].iter().product();
    let outer: usize = g.lattice.counts[..axis].iter().product();
    let mut values = Vec::with_capacity(lat.len());
    for o in 0..outer {
        for i in 0..n - shift {
            let a = (o * n + i) * inner;
            let b = (o * n + i + shift) * inner;
            for c in 0..inner {
                values.push(g.values[b + c] - g.values[a + c]);
            }
        }
    }
    Ok(LatticeFunction { lattice: lat, values })
}

/// `Δ^B_{(h)} = Δ^{1,b_1}_{h_1} ∘ ⋯ ∘ Δ^{d,b_d}_{h_d}`; `B = 0` is the identity.
pub fn delta_b(g: &LatticeFunction, b: &[u32], shift: &[usize]) -> Result<LatticeFunction> {
    let d = g.dim();
    check_dim(d, b.len())?;
    check_dim(d, shift.len())?;
    let mut cur = g.clone();
    for l in 0..d {
        for _ in 0..b[l] {
            cur = delta_axis(&cur, l, shift[l])?;
        }
    }
    Ok(cur)
}

/// `𝚫_h g = g(· + h) - g` with `h = shift ⊙ step`.
pub fn delta_diag(g: &LatticeFunction, shift: &[usize]) -> Result<LatticeFunction> {
    let d = g.dim();
    check_dim(d, shift.len())?;
    if shift.iter().all(|&s| s == 0) {
        return Err(invalid("diagonal shift must be non-zero"));
    }
    let moved = g.translate(shift)?;
    let base = g.window(&vec![0; d], &moved.lattice.counts)?;
    let values = moved.values.iter().zip(&base.values).map(|(a, b)| a - b).collect();
    Ok(LatticeFunction { lattice: moved.lattice, values })
}

/// `𝚫^n_h`, the diagonal difference composed `n` times.
pub fn delta_n(g: &LatticeFunction, n: u32, shift: &[usize]) -> Result<LatticeFunction> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let mut cur = g.clone();
    for _ in 0..n {
        cur = delta_diag(&cur, shift)?;
    }
    Ok(cur)
}

/// `Σ_k Θ_{(h)_{k,0}} Δ^k_{h_k} g` with `(h)_{k,0} = (h_1, …, h_{k-1}, 0, …)`,
/// restricted to the domain of `𝚫_h g`; equals `𝚫_h g` identically.
pub fn delta_diag_by_axes(g: &LatticeFunction, shift: &[usize]) -> Result<LatticeFunction> {
    let d = g.dim();
    check_dim(d, shift.len())?;
    let target: Vec<usize> = g
        .lattice
        .counts
        .iter()
        .zip(shift)
        .map(|(c, s)| c.checked_sub(*s).unwrap_or(0))
        .collect();
    let mut acc = vec![0.0; target.iter().product()];
    for k in 0..d {
        if shift[k] == 0 {
            continue;
        }
        let dk = delta_axis(g, k, shift[k])?;
        let mut off = vec![0usize; d];
        off[..k].copy_from_slice(&shift[..k]);
        let part = dk.window(&off, &target)?;
        for (a, v) in acc.iter_mut().zip(&part.values) {
            *a += v;
        }
    }
    let lat = Lattice::new(g.lattice.origin.clone(), g.lattice.step.clone(), target)?;
    LatticeFunction::new(lat, acc)
}

fn floor_alpha(alpha: f64) -> f64 {
    floor(alpha)
}

fn is_natural(a: f64) -> bool {
    a >= 1.0 && a == floor(a)
}

/// Case table of the directional rate functions: `𝓛₂(a,b)` for `α = 2` and
/// `𝓛_α(a,b,δ)` for `α ∈ (0,2)`.  NaN outside `α ∈ (0,2]`.
pub fn rate_l(alpha: f64, a: f64, b: f64, delta: f64) -> f64 {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return f64::NAN;
    }
    let ge = if b >= a { 1.0 } else { 0.0 };
    let eq = if b == a { 1.0 } else { 0.0 };
    if alpha == 2.0 {
        0.5 * ge + eq
    } else {
        (1.0 / alpha + floor_alpha(alpha) / 2.0 + delta) * ge + eq
    }
}

/// Case table of the rectangular rate functions: `𝓛̃₂(a)` for `α = 2` and
/// `𝓛̃_α(a,δ)` for `α ∈ (0,2)` (`ℕ = {1, 2, …}`).
pub fn rate_ltilde(alpha: f64, a: f64, delta: f64) -> f64 {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return f64::NAN;
    }
    let nat = if is_natural(a) { 1.0 } else { 0.0 };
    if alpha == 2.0 {
        0.5 + nat
    } else {
        1.0 / alpha + floor_alpha(alpha) / 2.0 + delta + nat
    }
}

/// `n₀ = 1 - d + Σ ⌈a_l⌉`.
pub fn n0(a: &[f64]) -> i64 {
    1 - a.len() as i64 + a.iter().map(|&v| ceil(v) as i64).sum::<i64>()
}

/// Which estimate a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    /// Generalised directional increments.
    Directional,
    /// Rectangular increments.
    Rectangular,
    /// Growth at infinity.
    Infinity,
}

impl ScanKind {
    /// Stable name.
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Directional => "directional",
            ScanKind::Rectangular => "rectangular",
            ScanKind::Infinity => "infinity",
        }
    }
}

/// Trend verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No two consecutive increases above 10%.
    BoundedTrend,
    /// Two consecutive increases above 10% occurred.
    Diverging,
}

impl Verdict {
    /// Stable name.
    pub fn name(self) -> &'static str {
        match self {
            Verdict::BoundedTrend => "bounded-trend",
            Verdict::Diverging => "diverging",
        }
    }
}

/// One row of a ratio table.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    /// Dyadic level `m` (shell index for infinity scans).
    pub level: u32,
    /// `|h_l|` (or the shell's outer radius).
    pub scale: f64,
    /// Mean over realisations of the per-realisation sup ratio.
    pub mean: f64,
    /// Median over realisations; the verdict is taken on this column because
    /// heavy-tailed realisations dominate the mean for `α < 2`.
    pub median: f64,
    /// Largest per-realisation sup ratio.
    pub max: f64,
    /// Whether the normaliser underflowed (`< 1e-300`): the level is ignored.
    pub void: bool,
}

/// Result of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    /// Scan kind.
    pub kind: ScanKind,
    /// Rows ordered by decreasing `|h|` (increasing `‖t‖` for infinity scans).
    pub rows: Vec<RatioRow>,
    /// Verdict on the row medians.
    pub verdict: Verdict,
    /// Parameters as key/value text.
    pub params: Vec<(String, String)>,
    /// Notes, e.g. capped shells.
    pub warnings: Vec<String>,
}

/// Bounded unless two consecutive usable steps both increase by more than
/// `tolerance` (relative).
pub fn trend_verdict(seq: &[f64], tolerance: f64) -> Verdict {
    let mut run = 0;
    for w in seq.windows(2) {
        if w[1] > (1.0 + tolerance) * w[0] {
            run += 1;
            if run >= 2 {
                return Verdict::Diverging;
            }
        } else {
            run = 0;
        }
    }
    Verdict::BoundedTrend
}

const DENOMINATOR_FLOOR: f64 = 1e-300;

fn log3inv(h: f64) -> f64 {
    ln(3.0 + 1.0 / h)
}

/// Options shared by the increment scans.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementScan {
    /// Half width `T` of the cube.
    pub t: f64,
    /// Levels `m = 1..=levels`, `|h_l| = T 2^{-m}`.
    pub levels: u32,
    /// Exponents `a_l` used in the normaliser.
    pub a: Vec<f64>,
    /// Stability index.
    pub alpha: f64,
    /// `δ` of the `α < 2` rate functions.
    pub delta: f64,
}

impl IncrementScan {
    /// Defaults: 8 levels, `δ = 0.1`.
    pub fn new(t: f64, a: Vec<f64>, alpha: f64) -> Self {
        IncrementScan { t, levels: 8, a, alpha, delta: 0.1 }
    }

    fn shifts(&self, lat: &Lattice, m: u32) -> Result<(Vec<usize>, f64)> {
        let h = self.t * exp2(-(m as f64));
        let mut out = Vec::with_capacity(lat.dim());
        for &s in &lat.step {
            let c = h / s;
            let r = round(c);
            if r < 1.0 || (c - r).abs() > 1e-9 * c.max(1.0) {
                return Err(Error::Lattice(format!(
                    "increment {h} is not a positive multiple of the lattice step {s}"
                )));
            }
            out.push(r as usize);
        }
        Ok((out, h))
    }

    fn check_coverage(&self, lat: &Lattice, reach: f64) -> Result<()> {
        for b in lat.bounds() {
            let tol = 1e-9 * reach.max(1.0);
            if b[0] > -self.t + tol || b[1] < reach - tol {
                return Err(Error::Lattice(format!(
                    "lattice [{}, {}] does not cover [-{}, {}]",
                    b[0], b[1], self.t, reach
                )));
            }
        }
        Ok(())
    }

    fn params(&self) -> Vec<(String, String)> {
        vec![
            ("T".into(), format!("{}", self.t)),
            ("levels".into(), format!("{}", self.levels)),
            ("a".into(), format!("{:?}", self.a)),
            ("alpha".into(), format!("{}", self.alpha)),
            ("delta".into(), format!("{}", self.delta)),
        ]
    }
}

fn finish(
    kind: ScanKind,
    per_level: Vec<(u32, f64, Vec<f64>, bool)>,
    params: Vec<(String, String)>,
    warnings: Vec<String>,
) -> RegularityReport {
    let rows: Vec<RatioRow> = per_level
        .into_iter()
        .map(|(level, scale, ratios, void)| {
            let mean = if ratios.is_empty() {
                0.0
            } else {
                ratios.iter().sum::<f64>() / ratios.len() as f64
            };
            let max = ratios.iter().fold(0.0f64, |m, v| m.max(*v));
            RatioRow { level, scale, mean, median: median(&ratios), max, void }
        })
        .collect();
    let seq: Vec<f64> = rows.iter().filter(|r| !r.void).map(|r| r.median).collect();
    let mut verdict = trend_verdict(&seq, 0.1);
    if seq.iter().any(|v| !v.is_finite()) {
        verdict = Verdict::Diverging;
    }
    RegularityReport { kind, rows, verdict, params, warnings }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Directional scan of `sup_{[-T,T]^d} |Δ^B_{(h)} X|` against
/// `Π |h_l|^{min(b_l,a_l)} (log(3+|h_l|^{-1}))^{𝓛(a_l,b_l)}` for the full
/// field, or the band form
/// `Π |h_l|^{b_l(1-η_l) + min(b_l,a_l)η_l} (log(3+|h_l|^{-1}))^{η_l 𝓛(a_l,b_l)}`
/// when the realisations carry a band.  The lattices must cover
/// `[-T, T(1 + l(B))]^d`.
pub fn directional_scan(
    realizations: &[FieldRealization],
    b: &[u32],
    opts: &IncrementScan,
) -> Result<RegularityReport> {
    let first = realizations.first().ok_or_else(|| invalid("no realisations"))?;
    let d = first.lattice.dim();
    check_dim(d, b.len())?;
    check_dim(d, opts.a.len())?;
    let lb: u32 = b.iter().sum();
    let band = first.meta.band.clone();
    let mut per_level = Vec::new();
    for m in 1..=opts.levels {
        let mut den = 1.0;
        let h = opts.t * exp2(-(m as f64));
        for l in 0..d {
            let (bl, al) = (b[l] as f64, opts.a[l]);
            let rate = rate_l(opts.alpha, al, bl, opts.delta);
            let (pw, lg) = match &band {
                None => (bl.min(al), rate),
                Some(eta) => {
                    let e = eta[l] as f64;
                    (bl * (1.0 - e) + bl.min(al) * e, e * rate)
                }
            };
            den *= powf(h, pw) * powf(log3inv(h), lg);
        }
        let void = !(den >= DENOMINATOR_FLOOR);
        let mut ratios = Vec::with_capacity(realizations.len());
        for r in realizations {
            if r.meta.band != band {
                return Err(invalid("realisations mix bands"));
            }
            let (shift, _) = opts.shifts(&r.lattice, m)?;
            let g = LatticeFunction::from_realization(r);
            let inc = if lb == 0 { g } else { delta_b(&g, b, &shift)? };
            if m == 1 {
                opts.check_coverage(&r.lattice, opts.t * (1.0 + lb as f64 / 2.0))?;
            }
            ratios.push(if void { 0.0 } else { ratio(inc.sup_on_cube(opts.t), den) });
        }
        per_level.push((m, h, ratios, void));
    }
    let mut params = opts.params();
    params.push(("B".into(), format!("{:?}", b)));
    params.push(("band".into(), format!("{:?}", band)));
    Ok(finish(ScanKind::Directional, per_level, params, Vec::new()))
}

/// Rectangular scan of `sup_{[-T,T]^d} |𝚫ⁿ_h X|` against
/// `Σ_l |h_l|^{a_l} (log(3+|h_l|^{-1}))^{𝓛̃(a_l)}` (full field) or
/// `Σ_l |h_l|^{η_l a_l + (1-η_l)⌈a_l⌉} (log(3+|h_l|^{-1}))^{η_l 𝓛̃(a_l)}` for a
/// band.  Requires `n ≥ n₀`.
pub fn rectangular_scan(
    realizations: &[FieldRealization],
    n: u32,
    opts: &IncrementScan,
) -> Result<RegularityReport> {
    let first = realizations.first().ok_or_else(|| invalid("no realisations"))?;
    let d = first.lattice.dim();
    check_dim(d, opts.a.len())?;
    let need = n0(&opts.a);
    if (n as i64) < need {
        return Err(Error::Precondition(format!("n = {n} is below n0 = {need}")));
    }
    let band = first.meta.band.clone();
    let mut per_level = Vec::new();
    for m in 1..=opts.levels {
        let h = opts.t * exp2(-(m as f64));
        let mut den = 0.0;
        for l in 0..d {
            let al = opts.a[l];
            let rate = rate_ltilde(opts.alpha, al, opts.delta);
            let (pw, lg) = match &band {
                None => (al, rate),
                Some(eta) => {
                    let e = eta[l] as f64;
                    (e * al + (1.0 - e) * ceil(al), e * rate)
                }
            };
            den += powf(h, pw) * powf(log3inv(h), lg);
        }
        let void = !(den >= DENOMINATOR_FLOOR);
        let mut ratios = Vec::with_capacity(realizations.len());
        for r in realizations {
            if r.meta.band != band {
                return Err(invalid("realisations mix bands"));
            }
            if m == 1 {
                opts.check_coverage(&r.lattice, opts.t * (1.0 + n as f64 / 2.0))?;
            }
            let (shift, _) = opts.shifts(&r.lattice, m)?;
            let inc = delta_n(&LatticeFunction::from_realization(r), n, &shift)?;
            ratios.push(if void { 0.0 } else { ratio(inc.sup_on_cube(opts.t), den) });
        }
        per_level.push((m, h, ratios, void));
    }
    let mut params = opts.params();
    params.push(("n".into(), format!("{n}")));
    params.push(("band".into(), format!("{:?}", band)));
    Ok(finish(ScanKind::Rectangular, per_level, params, Vec::new()))
}

/// Normaliser of the growth estimates at infinity for `|∂^b X^η(t)|`
/// (`band = None` is the full field).
pub fn infinity_normalizer(
    alpha: f64,
    delta: f64,
    a_prime: f64,
    band: Option<&[u8]>,
    b: &[u32],
    norm_t: f64,
) -> f64 {
    let low = band.map_or(true, |e| e.iter().all(|&v| v == 0));
    let smooth_part = low && b.iter().all(|&v| v == 0);
    if smooth_part {
        if alpha >= 2.0 {
            powf(norm_t, a_prime) * sqrt(ln(ln(3.0 + norm_t)))
        } else {
            powf(norm_t, a_prime) * powf(ln(3.0 + norm_t), 1.0 / alpha + delta)
        }
    } else if alpha < 1.0 {
        1.0
    } else {
        sqrt(ln(3.0 + norm_t))
    }
}

/// Options of [`infinity_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct InfinityScan {
    /// Shells `2^{k-1} < ‖t‖_∞ ≤ 2^k`, `k = 1..=shells`.
    pub shells: u32,
    /// Largest radius trusted by the kernel tables; farther shells are
    /// skipped with a warning.
    pub accuracy_cap: f64,
    /// `a'` of the density.
    pub a_prime: f64,
    /// Stability index.
    pub alpha: f64,
    /// `δ` of the `α < 2` normalisers.
    pub delta: f64,
}

impl InfinityScan {
    /// Defaults: 7 shells, cap `2^7`, `δ = 0.1`.
    pub fn new(a_prime: f64, alpha: f64) -> Self {
        InfinityScan { shells: 7, accuracy_cap: 128.0, a_prime, alpha, delta: 0.1 }
    }
}

/// Per dyadic shell, `sup |∂^b X^η(t)| / normaliser(‖t‖)` with the
/// normaliser of [`infinity_normalizer`] evaluated pointwise.
pub fn infinity_scan(
    realizations: &[FieldRealization],
    opts: &InfinityScan,
) -> Result<RegularityReport> {
    let first = realizations.first().ok_or_else(|| invalid("no realisations"))?;
    let d = first.lattice.dim();
    let band = first.meta.band.clone();
    let b = first.meta.b.clone();
    let mut warnings = Vec::new();
    let mut per_level = Vec::new();
    for k in 1..=opts.shells {
        let outer = exp2(k as f64);
        let inner = 0.5 * outer;
        if outer > opts.accuracy_cap * (1.0 + 1e-12) {
            warnings.push(format!("shell {k} (radius {outer}) beyond accuracy cap; skipped"));
            continue;
        }
        let mut ratios = Vec::with_capacity(realizations.len());
        for r in realizations {
            if r.meta.band != band || r.meta.b != b {
                return Err(invalid("realisations mix bands or derivative orders"));
            }
            let bounds = r.lattice.bounds();
            if bounds.iter().any(|bd| bd[0] > -outer + 1e-9 || bd[1] < outer - 1e-9) {
                return Err(Error::Lattice(format!("lattice does not cover shell radius {outer}")));
            }
            let mut x = [0.0f64; MAX_DIM];
            let mut sup = 0.0f64;
            for (i, v) in r.values.iter().enumerate() {
                r.lattice.point(i, &mut x[..d]);
                let ninf = x[..d].iter().fold(0.0f64, |m, c| m.max(c.abs()));
                if ninf > inner && ninf <= outer {
                    let n2 = sqrt(x[..d].iter().map(|c| c * c).sum());
                    let den = infinity_normalizer(
                        opts.alpha,
                        opts.delta,
                        opts.a_prime,
                        band.as_deref(),
                        &b,
                        n2,
                    );
                    sup = sup.max(ratio(v.abs(), den));
                }
            }
            ratios.push(sup);
        }
        per_level.push((k, outer, ratios, false));
    }
    let params = vec![
        ("shells".into(), format!("{}", opts.shells)),
        ("a_prime".into(), format!("{}", opts.a_prime)),
        ("alpha".into(), format!("{}", opts.alpha)),
        ("delta".into(), format!("{}", opts.delta)),
        ("band".into(), format!("{:?}", band)),
        ("b".into(), format!("{:?}", b)),
    ];
    Ok(finish(ScanKind::Infinity, per_level, params, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(trend_verdict(&[1.0, 1.2, 1.1, 1.3, 1.2], 0.1), Verdict::BoundedTrend);
        assert_eq!(trend_verdict(&[1.0, 1.2, 1.4], 0.1), Verdict::Diverging);
    }

    #[test]
    fn n0_examples() {
        assert_eq!(n0(&[0.7, 1.5]), 2);
        assert_eq!(n0(&[0.5]), 1);
    }
}
