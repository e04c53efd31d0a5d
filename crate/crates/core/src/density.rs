//! Spectral densities `f` and their admissibility conditions.
//!
//! A density is admissible for the wavelet series when
//! `∫ min(1, ‖ξ‖^α) |f(ξ)|^α dξ < ∞` and, for every multi-index `p` with
//! entries at most `p* = max(2, ⌊1/α⌋ + 1)`,
//!
//! * near the origin (`‖ξ‖ ≤ 8π√d/3`):
//!   `|∂^p f(ξ)| ≤ c' ‖ξ‖^{-a' - d/α - l(p)}`;
//! * away from it (`‖ξ‖ ≥ 2π/3`):
//!   `|∂^p f(ξ)| ≤ c Π_l (1 + |ξ_l|)^{-a_l - 1/α - p_l}`.
//!
//! The exponents `a'` (growth at infinity) and `a_l` (regularity along axis
//! `l`) are declared by the density and verified empirically by
//! [`check_admissibility`].

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Result};
use crate::math::{binomial, cos, falling, floor, powf, sin, sqrt, PI, TAU};
use crate::quadrature::GaussLegendre;
use crate::wavelet::check_alpha;
use crate::MAX_DIM;

/// `p* = max(2, ⌊1/α⌋ + 1)`, the derivative order entering the kernel bounds.
pub fn p_star(alpha: f64) -> u32 {
    let q = floor(1.0 / alpha) as u32 + 1;
    q.max(2)
}

/// Declared exponents of a density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityExponents {
    /// Low-frequency exponent `a' ∈ (0, 1)`.
    pub a_prime: f64,
    /// High-frequency (regularity) exponents `a_l > 0`, one per axis.
    pub a: Vec<f64>,
}

/// A spectral density `f: ℝ^d → ℂ`; only real even densities are supported,
/// so `f` is represented by its real values.
pub trait SpectralDensity: Send + Sync {
    /// Spatial dimension `d`.
    fn dim(&self) -> usize;
    /// `f(ξ)`.
    fn eval(&self, xi: &[f64]) -> f64;
    /// `∂^p f(ξ)`.  The default uses nested central differences of `eval`.
    fn partial(&self, p: &[u32], xi: &[f64]) -> f64 {
        finite_difference_partial(&|x: &[f64]| self.eval(x), p, xi)
    }
    /// Declared exponents `(a', a)`.
    fn exponents(&self) -> &DensityExponents;
}

/// Nested central differences `∂^p g(ξ)`; steps never cross a coordinate
/// hyperplane, where the densities of interest may have a kink.
pub fn finite_difference_partial(g: &dyn Fn(&[f64]) -> f64, p: &[u32], xi: &[f64]) -> f64 {
    let order: u32 = p.iter().sum();
    if order == 0 {
        return g(xi);
    }
    let l = p.iter().position(|&q| q > 0).unwrap_or(0);
    let mut rest = p.to_vec();
    rest[l] -= 1;
    let scale = xi[l].abs().max(1e-3);
    let mut h = scale * powf(f64::EPSILON, 1.0 / (order as f64 + 2.0));
    if xi[l] != 0.0 {
        h = h.min(0.25 * xi[l].abs());
    }
    let mut plus = xi.to_vec();
    let mut minus = xi.to_vec();
    plus[l] += h;
    minus[l] -= h;
    (finite_difference_partial(g, &rest, &plus) - finite_difference_partial(g, &rest, &minus))
        / (2.0 * h)
}

/// The closed-form density
/// `f(ξ) = (Σ ξ_l²)^{-(u + d/α)/2} Π_l (1 + |ξ_l|)^{-v_l}`,
/// with `u ∈ (0, 1)` and `v_l ≥ 0`.
///
/// Default exponents: `a' = u` and `a_l = v_l + u/d`.  The latter is the
/// largest common choice satisfying the high-frequency bound along every
/// direction (including the diagonal, where all coordinates grow together).
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinDensity {
    alpha: f64,
    u: f64,
    v: Vec<f64>,
    exps: DensityExponents,
}

impl BuiltinDensity {
    /// Builtin density with default exponents.
    pub fn new(alpha: f64, u: f64, v: Vec<f64>) -> Result<Self> {
        check_alpha(alpha)?;
        let d = v.len();
        if d == 0 || d > MAX_DIM {
            return Err(invalid("density dimension must be 1, 2 or 3"));
        }
        if !(u > 0.0 && u < 1.0) {
            return Err(invalid("builtin density needs u in (0, 1)"));
        }
        if v.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(invalid("builtin density needs v_l >= 0"));
        }
        let a = v.iter().map(|&vl| vl + u / d as f64).collect();
        Ok(BuiltinDensity { alpha, u, v, exps: DensityExponents { a_prime: u, a } })
    }

    /// Replace the declared exponents (e.g. to test a wrong claim).
    pub fn with_exponents(mut self, exps: DensityExponents) -> Result<Self> {
        check_dim(self.v.len(), exps.a.len())?;
        self.exps = exps;
        Ok(self)
    }

    /// Stability index the density was built for.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Low-frequency parameter `u`.
    pub fn u(&self) -> f64 {
        self.u
    }
    /// High-frequency parameters `v`.
    pub fn v(&self) -> &[f64] {
        &self.v
    }
    /// Radial exponent `s = u + d/α`.
    pub fn radial_exponent(&self) -> f64 {
        self.u + self.v.len() as f64 / self.alpha
    }
}

/// Term `c ξ^e (Σξ²)^{-(s+2m)/2}` of a radial derivative.
#[derive(Debug, Clone, Copy)]
struct RadialTerm {
    c: f64,
    e: [u32; MAX_DIM],
    m: u32,
}

/// `∂^p (Σ ξ_l²)^{-s/2}` by symbolic expansion.
fn radial_partial(s: f64, p: &[u32], xi: &[f64]) -> f64 {
    let mut terms = vec![RadialTerm { c: 1.0, e: [0; MAX_DIM], m: 0 }];
    for (l, &pl) in p.iter().enumerate() {
        for _ in 0..pl {
            let mut next: Vec<RadialTerm> = Vec::with_capacity(2 * terms.len());
            let mut push = |t: RadialTerm| {
                if let Some(x) = next.iter_mut().find(|x| x.e == t.e && x.m == t.m) {
                    x.c += t.c;
                } else {
                    next.push(t);
                }
            };
            for t in &terms {
                if t.e[l] > 0 {
                    let mut e = t.e;
                    e[l] -= 1;
                    push(RadialTerm { c: t.c * t.e[l] as f64, e, m: t.m });
                }
                let mut e = t.e;
                e[l] += 1;
                push(RadialTerm { c: -t.c * (s + 2.0 * t.m as f64), e, m: t.m + 1 });
            }
            terms = next;
        }
    }
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let base = powf(r2, -0.5 * s);
    terms
        .iter()
        .map(|t| {
            let mut v = t.c * base * powf(r2, -(t.m as f64));
            for (l, &x) in xi.iter().enumerate() {
                if t.e[l] > 0 {
                    v *= powf(x, t.e[l] as f64);
                }
            }
            v
        })
        .sum()
}

impl SpectralDensity for BuiltinDensity {
    fn dim(&self) -> usize {
        self.v.len()
    }

    fn eval(&self, xi: &[f64]) -> f64 {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        let mut f = powf(r2, -0.5 * self.radial_exponent());
        for (x, v) in xi.iter().zip(&self.v) {
            if *v != 0.0 {
                f *= powf(1.0 + x.abs(), -v);
            }
        }
        f
    }

    fn partial(&self, p: &[u32], xi: &[f64]) -> f64 {
        let d = self.dim();
        let s = self.radial_exponent();
        // Univariate factors g_l(x) = (1+|x|)^{-v_l} and their derivatives.
        let uni = |l: usize, q: u32| -> f64 {
            let x = xi[l];
            let v = self.v[l];
            let sign = if x < 0.0 && q % 2 == 1 { -1.0 } else { 1.0 };
            sign * falling(-v, q) * powf(1.0 + x.abs(), -v - q as f64)
        };
        let mut q = [0u32; MAX_DIM];
        let mut total = 0.0;
        loop {
            let mut coef = 1.0;
            for l in 0..d {
                coef *= binomial(p[l], q[l]) * uni(l, q[l]);
            }
            if coef != 0.0 {
                let mut rem = [0u32; MAX_DIM];
                for l in 0..d {
                    rem[l] = p[l] - q[l];
                }
                total += coef * radial_partial(s, &rem[..d], xi);
            }
            // Next multi-index q ≤ p.
            let mut l = 0;
            loop {
                if l == d {
                    return total;
                }
                if q[l] < p[l] {
                    q[l] += 1;
                    break;
                }
                q[l] = 0;
                l += 1;
            }
        }
    }

    fn exponents(&self) -> &DensityExponents {
        &self.exps
    }
}

/// Boxed density closure.
pub type DensityFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A density given by a closure; partial derivatives use finite differences.
pub struct FnDensity {
    d: usize,
    f: DensityFn,
    exps: DensityExponents,
}

impl FnDensity {
    /// Wrap `f` with declared exponents.
    pub fn new(
        f: DensityFn,
        exps: DensityExponents,
    ) -> Result<Self> {
        let d = exps.a.len();
        if d == 0 || d > MAX_DIM {
            return Err(invalid("density dimension must be 1, 2 or 3"));
        }
        Ok(FnDensity { d, f, exps })
    }
}

impl core::fmt::Debug for FnDensity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnDensity").field("d", &self.d).field("exps", &self.exps).finish()
    }
}

impl SpectralDensity for FnDensity {
    fn dim(&self) -> usize {
        self.d
    }
    fn eval(&self, xi: &[f64]) -> f64 {
        (self.f)(xi)
    }
    fn exponents(&self) -> &DensityExponents {
        &self.exps
    }
}

/// Sampling options for [`check_admissibility`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityOptions {
    /// Refinement levels; each level extends the radial range by `2^4`.
    pub levels: usize,
    /// Radii per level (log-spaced).
    pub radii_per_level: usize,
    /// Generic directions on the sphere (axis-hugging ones are added).
    pub directions: usize,
    /// Dyadic shells on each side of `‖ξ‖_∞ = 1` for the integral.
    pub shells: i32,
    /// Threshold on level-to-level growth of a supremum.
    pub growth_tolerance: f64,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        AdmissibilityOptions {
            levels: 5,
            radii_per_level: 8,
            directions: 16,
            shells: 40,
            growth_tolerance: 0.10,
        }
    }
}

/// Cumulative suprema of a bound ratio across refinement levels.
#[derive(Debug, Clone, PartialEq)]
pub struct SupSequence {
    /// Supremum over all sample points up to each level.
    pub per_level: Vec<f64>,
    /// Empirical constant (final supremum).
    pub constant: f64,
    /// `true` when the last level raised the supremum by at most the
    /// growth tolerance.
    pub stable: bool,
}

/// Result of [`check_admissibility`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Estimate of `∫ min(1, ‖ξ‖^α) |f|^α dξ` (shell sum plus geometric tails).
    pub integral: f64,
    /// Contribution of each dyadic shell `2^n ≤ ‖ξ‖_∞ < 2^{n+1}`.
    pub shell_contributions: Vec<(i32, f64)>,
    /// Shell contributions decay geometrically at both ends.
    pub integrable: bool,
    /// Near-origin ratio `|∂^p f| ‖ξ‖^{a' + d/α + l(p)}`.
    pub near: SupSequence,
    /// Far-field ratio `|∂^p f| Π (1+|ξ_l|)^{a_l + 1/α + p_l}`.
    pub far: SupSequence,
    /// `p*` used for the multi-indices.
    pub p_star: u32,
    /// All three conditions hold.
    pub admissible: bool,
}

fn unit_directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    match d {
        1 => {
            dirs.push(vec![1.0]);
            dirs.push(vec![-1.0]);
        }
        2 => {
            for i in 0..n {
                let th = TAU * (i as f64 + 0.5) / n as f64;
                dirs.push(vec![cos(th), sin(th)]);
            }
            for q in 0..4 {
                for off in [1e-3, -1e-3] {
                    let th = 0.5 * PI * q as f64 + off;
                    dirs.push(vec![cos(th), sin(th)]);
                }
            }
        }
        _ => {
            // Fibonacci sphere plus axis-hugging points.
            let golden = PI * (3.0 - sqrt(5.0));
            for i in 0..n {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = sqrt(1.0 - z * z);
                let th = golden * i as f64;
                dirs.push(vec![r * cos(th), r * sin(th), z]);
            }
            for l in 0..3 {
                for sgn in [1.0, -1.0] {
                    let mut v = [1e-3, -1.3e-3, 0.7e-3];
                    v[l] = sgn;
                    let nrm = sqrt(v.iter().map(|x| x * x).sum());
                    dirs.push(v.iter().map(|x| x / nrm).collect());
                }
            }
        }
    }
    dirs
}

fn multi_indices(d: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut q = vec![0u32; d];
    loop {
        out.push(q.clone());
        let mut l = 0;
        loop {
            if l == d {
                return out;
            }
            if q[l] < max {
                q[l] += 1;
                break;
            }
            q[l] = 0;
            l += 1;
        }
    }
}

fn sup_sequence(per_level: Vec<f64>, tol: f64) -> SupSequence {
    let n = per_level.len();
    let constant = per_level.last().copied().unwrap_or(0.0);
    let stable = constant.is_finite()
        && (n < 2 || per_level[n - 1] <= (1.0 + tol) * per_level[n - 2]);
    SupSequence { per_level, constant, stable }
}

/// Empirically check the admissibility conditions against the exponents the
/// density declares.
pub fn check_admissibility(
    density: &dyn SpectralDensity,
    alpha: f64,
    opts: &AdmissibilityOptions,
) -> Result<AdmissibilityReport> {
    check_alpha(alpha)?;
    let d = density.dim();
    let exps = density.exponents().clone();
    check_dim(d, exps.a.len())?;
    let ps = p_star(alpha);
    let dirs = unit_directions(d, opts.directions);
    let indices = multi_indices(d, ps);
    let df = d as f64;
    let r_near = 8.0 * PI * sqrt(df) / 3.0;
    let r_far = 2.0 * PI / 3.0;
    let nr = opts.radii_per_level.max(1);

    let mut near_levels = Vec::with_capacity(opts.levels);
    let mut far_levels = Vec::with_capacity(opts.levels);
    let (mut near_sup, mut far_sup) = (0.0f64, 0.0f64);
    let mut xi = vec![0.0; d];
    for level in 0..opts.levels {
        for i in 0..nr {
            let t = 4.0 * (level as f64 + i as f64 / nr as f64);
            let rn = r_near * powf(2.0, -t);
            let rf = r_far * powf(2.0, t);
            for dir in &dirs {
                for p in &indices {
                    let lp: u32 = p.iter().sum();
                    for l in 0..d {
                        xi[l] = rn * dir[l];
                    }
                    let v = density.partial(p, &xi).abs()
                        * powf(rn, exps.a_prime + df / alpha + lp as f64);
                    near_sup = near_sup.max(if v.is_nan() { f64::INFINITY } else { v });
                    for l in 0..d {
                        xi[l] = rf * dir[l];
                    }
                    let mut w = density.partial(p, &xi).abs();
                    for l in 0..d {
                        w *= powf(1.0 + xi[l].abs(), exps.a[l] + 1.0 / alpha + p[l] as f64);
                    }
                    far_sup = far_sup.max(if w.is_nan() { f64::INFINITY } else { w });
                }
            }
        }
        near_levels.push(near_sup);
        far_levels.push(far_sup);
    }
    let near = sup_sequence(near_levels, opts.growth_tolerance);
    let far = sup_sequence(far_levels, opts.growth_tolerance);

    // Dyadic-shell quadrature of min(1, ‖ξ‖^α)|f|^α.
    let gl = GaussLegendre::new(6);
    let integrand = |x: &[f64]| -> f64 {
        let r = sqrt(x.iter().map(|v| v * v).sum());
        let w = if r < 1.0 { powf(r, alpha) } else { 1.0 };
        w * powf(density.eval(x).abs(), alpha)
    };
    let mut shell_contributions = Vec::new();
    let cells_per_axis = 4usize;
    let ncell = cells_per_axis.pow(d as u32);
    let nq = gl.len().pow(d as u32);
    for n in -opts.shells..opts.shells {
        let w = powf(2.0, n as f64);
        let mut acc = 0.0;
        for c in 0..ncell {
            let mut idx = [0usize; MAX_DIM];
            let mut rem = c;
            let mut outer = false;
            for l in 0..d {
                idx[l] = rem % cells_per_axis;
                rem /= cells_per_axis;
                outer |= idx[l] == 0 || idx[l] == 3;
            }
            if !outer {
                continue;
            }
            for qi in 0..nq {
                let mut r = qi;
                let mut wt = 1.0;
                for l in 0..d {
                    let g = r % gl.len();
                    r /= gl.len();
                    let lo = w * (idx[l] as f64 - 2.0);
                    xi[l] = lo + 0.5 * w * (gl.nodes[g] + 1.0);
                    wt *= 0.5 * w * gl.weights[g];
                }
                acc += wt * integrand(&xi);
            }
        }
        shell_contributions.push((n, acc));
    }
    let c: Vec<f64> = shell_contributions.iter().map(|x| x.1).collect();
    let total: f64 = c.iter().sum();
    let tail = |a: f64, b: f64, c2: f64| -> Option<f64> {
        // a = outermost, b, c2 = next ones inward; require monotone decay.
        if a.is_finite() && a < b && b < c2 {
            let r = a / b;
            Some(a * r / (1.0 - r))
        } else if a == 0.0 && b == 0.0 {
            Some(0.0)
        } else {
            None
        }
    };
    let m = c.len();
    let lo_tail = tail(c[0], c[1], c[2]);
    let hi_tail = tail(c[m - 1], c[m - 2], c[m - 3]);
    let integrable = total.is_finite() && lo_tail.is_some() && hi_tail.is_some();
    let integral = total + lo_tail.unwrap_or(f64::INFINITY) + hi_tail.unwrap_or(f64::INFINITY);

    let admissible = integrable && near.stable && far.stable;
    Ok(AdmissibilityReport {
        integral,
        shell_contributions,
        integrable,
        near,
        far,
        p_star: ps,
        admissible,
    })
}
