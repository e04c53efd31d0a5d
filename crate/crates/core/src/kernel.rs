//! The synthesis kernels `Ψ_{α,J}` and their derivatives.
//!
//! ```text
//! ∂^b Ψ_{α,J}(x) = 2^{Σj/α} i^{l(b)} ∫ e^{i x·ξ} ξ^b f(2^J ξ) ψ̂_{0,0}(ξ) dξ
//! ```
//!
//! The integrand lives on the compact set `𝒦^d`, `𝒦 = {2π/3 ≤ |λ| ≤ 8π/3}`,
//! and is evaluated by tensor Gauss–Legendre quadrature.  The field
//! coefficients are `s_{J,K}(t) = Ψ_J(2^J t - K) - Ψ_J(-K)` (α = 2 kernel),
//! which [`compute_s_jk`] evaluates independently from its defining integral.

use alloc::vec;
use alloc::vec::Vec;

use crate::density::{p_star, SpectralDensity};
use crate::error::{check_dim, invalid, Error, Result};
use crate::math::{ceil, checked_exp2, exp2, floor, log2, powi, sincos};
use crate::quadrature::{GaussLegendre, Rule};
use crate::wavelet::{check_alpha, shifted_profile, LAMBDA_HI, LAMBDA_LO, LAMBDA_MID};
use crate::{Complex64, MAX_DIM};

/// Tensor Gauss–Legendre parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadratureSpec {
    /// Minimum nodes per half band `[2π/3, 8π/3]` (each sign).
    pub nodes_per_half_band: usize,
    /// Nodes per composite panel.
    pub panel_nodes: usize,
}

impl QuadratureSpec {
    /// 64 nodes per half band for `d ≤ 2`, 24 for `d = 3`.
    pub fn default_for(d: usize) -> Self {
        let n = if d <= 2 { 64 } else { 24 };
        QuadratureSpec { nodes_per_half_band: n, panel_nodes: if d <= 2 { 16 } else { 12 } }
    }

    /// Symmetric one-dimensional rule on `𝒦`, refined so that `e^{i ω λ}`
    /// with `|ω| ≤ omega_max` stays resolved.
    pub fn band_rule(&self, omega_max: f64) -> Rule {
        let base = GaussLegendre::new(self.panel_nodes.max(2));
        let min_panels = (self.nodes_per_half_band / base.len()).max(2);
        // Panels are split between the two smooth pieces of the profile in
        // proportion to their lengths (1 : 2).
        let p1 = min_panels.div_ceil(3).max(1);
        let p2 = (min_panels - p1).max(1);
        let osc = |len: f64| ceil(omega_max.abs() * len / 8.0) as usize;
        let p1 = p1.max(osc(LAMBDA_MID - LAMBDA_LO));
        let p2 = p2.max(osc(LAMBDA_HI - LAMBDA_MID));
        let mut half = Rule::composite(LAMBDA_LO, LAMBDA_MID, p1, &base);
        half.push_composite(LAMBDA_MID, LAMBDA_HI, p2, &base);
        half.mirrored()
    }
}

/// `i^n` for integer `n ≥ 0`.
fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `2^{Σ j_l / α}` with overflow detection.
pub fn kernel_prefactor(j: &[i32], alpha: f64) -> Result<f64> {
    let s: i64 = j.iter().map(|&v| v as i64).sum();
    checked_exp2(s as f64 / alpha)
}

fn check_multi(d: usize, j: &[i32], b: &[u32]) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(invalid("dimension must be 1, 2 or 3"));
    }
    check_dim(d, j.len())?;
    check_dim(d, b.len())
}

/// Iterate over the tensor grid of per-axis rules in row-major order,
/// calling `g(indices, nodes, weight)`.
fn for_each_tensor(rules: &[Rule], mut g: impl FnMut(&[usize], &[f64], f64)) {
    let d = rules.len();
    let mut idx = [0usize; MAX_DIM];
    let mut lam = [0.0f64; MAX_DIM];
    loop {
        let mut w = 1.0;
        for l in 0..d {
            lam[l] = rules[l].x[idx[l]];
            w *= rules[l].w[idx[l]];
        }
        g(&idx[..d], &lam[..d], w);
        let mut l = d;
        loop {
            if l == 0 {
                return;
            }
            l -= 1;
            idx[l] += 1;
            if idx[l] < rules[l].len() {
                break;
            }
            idx[l] = 0;
        }
    }
}

/// `∂^b Ψ_{α,J}(x)` by direct tensor quadrature.
pub fn compute_psi(
    density: &dyn SpectralDensity,
    alpha: f64,
    j: &[i32],
    b: &[u32],
    x: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_alpha(alpha)?;
    let d = density.dim();
    check_multi(d, j, b)?;
    check_dim(d, x.len())?;
    let pre = kernel_prefactor(j, alpha)?;
    let scale: Vec<f64> = j.iter().map(|&v| exp2(v as f64)).collect();
    let rules: Vec<Rule> = x.iter().map(|&xl| quad.band_rule(xl)).collect();
    // Separable per-axis factors e^{i x λ} λ^b ψ̂¹(λ).
    let factors: Vec<Vec<Complex64>> = (0..d)
        .map(|l| {
            rules[l]
                .x
                .iter()
                .map(|&lam| {
                    let (s, c) = sincos(x[l] * lam);
                    Complex64::new(c, s) * powi(lam, b[l] as i32) * crate::wavelet::meyer_hat(lam)
                })
                .collect()
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut arg = [0.0f64; MAX_DIM];
    for_each_tensor(&rules, |idx, lam, w| {
        let mut z = Complex64::new(1.0, 0.0);
        for l in 0..d {
            z *= factors[l][idx[l]];
            arg[l] = scale[l] * lam[l];
        }
        acc += z * (w * density.eval(&arg[..d]));
    });
    let lb: u32 = b.iter().sum();
    Ok((i_pow(lb) * acc * pre).re)
}

/// `s_{J,K}(t) = ∫ (e^{i t·ξ} - 1) f(ξ) ψ̂_{J,K}(ξ) dξ` integrated directly in
/// the frequency variable over the support of `ψ̂_{J,K}`.
pub fn compute_s_jk(
    density: &dyn SpectralDensity,
    j: &[i32],
    k: &[i64],
    t: &[f64],
    quad: &QuadratureSpec,
) -> Result<f64> {
    let d = density.dim();
    if d == 0 || d > MAX_DIM {
        return Err(invalid("dimension must be 1, 2 or 3"));
    }
    check_dim(d, j.len())?;
    check_dim(d, k.len())?;
    check_dim(d, t.len())?;
    // Per axis: nodes ξ = 2^j λ on the band, with the L² atom factor.
    let mut rules = Vec::with_capacity(d);
    let mut atom = Vec::with_capacity(d);
    for l in 0..d {
        let s = exp2(j[l] as f64);
        let omega = (s * t[l] - k[l] as f64).abs().max(k[l].abs() as f64) + 1.0;
        let lam_rule = quad.band_rule(omega);
        let rule = Rule {
            x: lam_rule.x.iter().map(|&lam| s * lam).collect(),
            w: lam_rule.w.iter().map(|&w| s * w).collect(),
        };
        let norm = exp2(-0.5 * j[l] as f64);
        atom.push(
            lam_rule.x.iter().map(|&lam| shifted_profile(k[l], lam) * norm).collect::<Vec<_>>(),
        );
        rules.push(rule);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for_each_tensor(&rules, |idx, xi, w| {
        let mut a = Complex64::new(1.0, 0.0);
        let mut phase = 0.0;
        for l in 0..d {
            a *= atom[l][idx[l]];
            phase += t[l] * xi[l];
        }
        let (s, c) = sincos(phase);
        acc += (Complex64::new(c - 1.0, s) * a) * (w * density.eval(xi));
    });
    Ok(acc.re)
}

/// Table geometry for [`PsiTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    /// Half width `W`: the table covers `[-W, W]^d`.
    pub half_width: f64,
    /// Node spacing.
    pub step: f64,
}

impl TableSpec {
    /// Defaults: `W = 96, step = 1/64` (d = 1); `W = 20, step = 1/8` (d = 2);
    /// `W = 8, step = 1/4` (d = 3).  In one dimension the kernel envelope at
    /// `|x| = 96` is below `1e-8` of its peak.
    pub fn default_for(d: usize) -> Self {
        match d {
            1 => TableSpec { half_width: 96.0, step: 1.0 / 64.0 },
            2 => TableSpec { half_width: 20.0, step: 1.0 / 8.0 },
            _ => TableSpec { half_width: 8.0, step: 0.25 },
        }
    }
}

/// Tabulated `∂^b Ψ_{α,J}` on a regular grid with tensor cubic interpolation.
///
/// Outside `[-W, W]^d` the kernel is taken to be zero; `tail_ratio` records
/// the largest table value in the outermost unit layer relative to the
/// table maximum, which bounds what that truncation discards.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTable {
    /// Dilation index.
    pub j: Vec<i32>,
    /// Derivative multi-index.
    pub b: Vec<u32>,
    /// Stability index.
    pub alpha: f64,
    /// Half width `W`.
    pub half_width: f64,
    /// Node spacing.
    pub step: f64,
    /// Nodes per axis.
    pub n: usize,
    /// Row-major values.
    pub values: Vec<f64>,
    /// Value at the origin.
    pub center: f64,
    /// Largest value within one unit of the boundary, relative to the maximum.
    pub tail_ratio: f64,
}

/// Phasors `e^{i x_m λ}` for `x_m = x0 + m h`, resynchronised exactly every 32 steps.
fn phasor_row(x0: f64, h: f64, n: usize, lambda: f64, out: &mut [Complex64]) {
    let (s, c) = sincos(h * lambda);
    let stepc = Complex64::new(c, s);
    let mut z = Complex64::new(0.0, 0.0);
    for (m, slot) in out.iter_mut().enumerate().take(n) {
        if m % 32 == 0 {
            let (s, c) = sincos((x0 + m as f64 * h) * lambda);
            z = Complex64::new(c, s);
        } else {
            z *= stepc;
        }
        *slot = z;
    }
}

impl PsiTable {
    /// Tabulate `∂^b Ψ_{α,J}` on `[-W, W]^d`.
    pub fn build(
        density: &dyn SpectralDensity,
        alpha: f64,
        j: &[i32],
        b: &[u32],
        spec: &TableSpec,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let d = density.dim();
        check_multi(d, j, b)?;
        if !(spec.half_width > 0.0 && spec.step > 0.0) {
            return Err(invalid("table half width and step must be positive"));
        }
        let pre = kernel_prefactor(j, alpha)?;
        let nside = ceil(spec.half_width / spec.step - 1e-9) as usize;
        let w = nside as f64 * spec.step;
        let n = 2 * nside + 1;
        let rule = quad.band_rule(w);
        let nl = rule.len();
        let scale: Vec<f64> = j.iter().map(|&v| exp2(v as f64)).collect();
        // Integrand on the λ tensor grid.
        let axis: Vec<Vec<Complex64>> = (0..d)
            .map(|l| {
                rule.x
                    .iter()
                    .zip(&rule.w)
                    .map(|(&lam, &wt)| {
                        crate::wavelet::meyer_hat(lam) * (wt * powi(lam, b[l] as i32))
                    })
                    .collect()
            })
            .collect();
        let mut shape = vec![nl; d];
        let mut data: Vec<Complex64> = Vec::with_capacity(nl.pow(d as u32));
        {
            let rules = vec![rule.clone(); d];
            let mut arg = [0.0f64; MAX_DIM];
            for_each_tensor(&rules, |idx, lam, _| {
                let mut z = Complex64::new(1.0, 0.0);
                for l in 0..d {
                    z *= axis[l][idx[l]];
                    arg[l] = scale[l] * lam[l];
                }
                data.push(z * density.eval(&arg[..d]));
            });
        }
        // Contract one axis at a time: λ_l → x_l.
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        for l in 0..d {
            let outer: usize = shape[..l].iter().product();
            let inner: usize = shape[l + 1..].iter().product();
            let mut next = vec![Complex64::new(0.0, 0.0); outer * n * inner];
            for (li, &lam) in rule.x.iter().enumerate() {
                phasor_row(-w, spec.step, n, lam, &mut row);
                for o in 0..outer {
                    let src = &data[(o * nl + li) * inner..(o * nl + li + 1) * inner];
                    for (xm, p) in row.iter().enumerate() {
                        let dst = &mut next[(o * n + xm) * inner..(o * n + xm + 1) * inner];
                        for (dv, sv) in dst.iter_mut().zip(src) {
                            *dv += *p * *sv;
                        }
                    }
                }
            }
            shape[l] = n;
            data = next;
        }
        let lb: u32 = b.iter().sum();
        let phase = i_pow(lb) * pre;
        let values: Vec<f64> = data.iter().map(|z| (*z * phase).re).collect();
        let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut center_idx = 0;
        for _ in 0..d {
            center_idx = center_idx * n + nside;
        }
        let center = values[center_idx];
        // Largest value within one unit of the boundary.
        let layer = (1.0 / spec.step).max(1.0) as usize;
        let mut tail = 0.0f64;
        let mut idx = [0usize; MAX_DIM];
        for (flat, v) in values.iter().enumerate() {
            let mut r = flat;
            for l in (0..d).rev() {
                idx[l] = r % n;
                r /= n;
            }
            let edge = (0..d).any(|l| idx[l] < layer || idx[l] + layer >= n);
            if edge {
                tail = tail.max(v.abs());
            }
        }
        Ok(PsiTable {
            j: j.to_vec(),
            b: b.to_vec(),
            alpha,
            half_width: w,
            step: spec.step,
            n,
            values,
            center,
            tail_ratio: if max > 0.0 { tail / max } else { 0.0 },
        })
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.j.len()
    }

    /// Fail with a coverage error when the table cannot serve arguments up to
    /// `radius` in sup-norm.
    pub fn require_coverage(&self, radius: f64) -> Result<()> {
        if radius + 2.0 * self.step > self.half_width {
            return Err(Error::Coverage(alloc::format!(
                "table half width {} does not cover radius {}",
                self.half_width,
                radius
            )));
        }
        Ok(())
    }

    /// Interpolated value; zero outside the table.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.dim();
        let mut base = [0isize; MAX_DIM];
        let mut wts = [[0.0f64; 4]; MAX_DIM];
        for l in 0..d {
            if x[l].abs() > self.half_width {
                return 0.0;
            }
            let u = (x[l] + self.half_width) / self.step;
            let i0 = floor(u);
            let t = u - i0;
            base[l] = i0 as isize - 1;
            wts[l] = [
                -t * (t - 1.0) * (t - 2.0) / 6.0,
                (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
                -(t + 1.0) * t * (t - 2.0) / 2.0,
                (t + 1.0) * t * (t - 1.0) / 6.0,
            ];
        }
        let n = self.n as isize;
        let mut acc = 0.0;
        let terms = 4usize.pow(d as u32);
        'outer: for c in 0..terms {
            let mut r = c;
            let mut flat = 0isize;
            let mut w = 1.0;
            for l in 0..d {
                let o = (r % 4) as isize;
                r /= 4;
                let i = base[l] + o;
                if i < 0 || i >= n {
                    continue 'outer;
                }
                flat = flat * n + i;
                w *= wts[l][o as usize];
            }
            acc += w * self.values[flat as usize];
        }
        acc
    }
}

/// Which kernel bound is tested by [`verify_localization`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalizationCase {
    /// `Ψ_{α,-J}` with `J ∈ ℤ₊^d`: prefactor `(Σ2^{-j_l})^{-a'-d/α} Π 2^{-j_l/α}`.
    LowFrequency,
    /// `Ψ_{α,J}` with `J ∈ ℤ₁^d` (all axes high): prefactor `Π 2^{-j_l a_l}`.
    HighFrequency,
}

/// Sampling for [`verify_localization`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationOptions {
    /// Decay fit range along the first axis.
    pub x_range: (f64, f64),
    /// Log-spaced windows in the decay range.
    pub windows: usize,
    /// Samples per window (the window maximum is the envelope).
    pub samples_per_window: usize,
    /// Dilation level used for the decay fit.
    pub decay_level: i32,
    /// Dilation levels `j` used for the prefactor fit (`J = j·(1,…,1)`).
    pub levels: Vec<i32>,
    /// Half width of the sup box for the prefactor fit.
    pub box_half: f64,
    /// Points per axis of the sup box.
    pub box_points: usize,
}

impl LocalizationOptions {
    /// Defaults for a case: low-frequency levels 8–14, high-frequency 4–10.
    pub fn default_for(case: LocalizationCase) -> Self {
        let levels = match case {
            LocalizationCase::LowFrequency => (8..=14).collect(),
            LocalizationCase::HighFrequency => (4..=10).collect(),
        };
        LocalizationOptions {
            x_range: (5.0, 100.0),
            windows: 12,
            samples_per_window: 24,
            decay_level: 2,
            levels,
            box_half: 3.0,
            box_points: 61,
        }
    }
}

/// Outcome of [`verify_localization`].
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationReport {
    /// `p*` of the bound.
    pub p_star: u32,
    /// Envelope samples `(|x|, max |∂^bΨ|)`.
    pub envelope: Vec<(f64, f64)>,
    /// Least-squares slope of `log envelope` against `log(1 + |x|)`.
    pub spatial_slope: f64,
    /// Required: slope `≤ -p* + 0.5`.
    pub spatial_ok: bool,
    /// `(j, sup_box |∂^bΨ|)` for the prefactor fit.
    pub scale: Vec<(i32, f64)>,
    /// Fitted base-2 exponent per unit `j`.
    pub fitted_exponent: f64,
    /// Exponent predicted by the bound.
    pub predicted_exponent: f64,
    /// Fitted exponent within 10% of the prediction.
    pub exponent_ok: bool,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Empirical check of the kernel localisation bounds: spatial decay of the
/// envelope and the dyadic scaling of the kernel amplitude.
pub fn verify_localization(
    density: &dyn SpectralDensity,
    alpha: f64,
    case: LocalizationCase,
    b: &[u32],
    opts: &LocalizationOptions,
    quad: &QuadratureSpec,
) -> Result<LocalizationReport> {
    let d = density.dim();
    check_dim(d, b.len())?;
    let ps = p_star(alpha);
    let sign = match case {
        LocalizationCase::LowFrequency => -1,
        LocalizationCase::HighFrequency => 1,
    };
    let jdec = vec![sign * opts.decay_level.abs(); d];
    let (x0, x1) = opts.x_range;
    let nw = opts.windows.max(2);
    let mut envelope = Vec::with_capacity(nw);
    let mut x = vec![0.0; d];
    for w in 0..nw {
        let lo = x0 * crate::math::powf(x1 / x0, w as f64 / nw as f64);
        let hi = x0 * crate::math::powf(x1 / x0, (w + 1) as f64 / nw as f64);
        let mut m = 0.0f64;
        for s in 0..opts.samples_per_window {
            x[0] = lo + (hi - lo) * (s as f64 + 0.5) / opts.samples_per_window as f64;
            m = m.max(compute_psi(density, alpha, &jdec, b, &x, quad)?.abs());
        }
        envelope.push((crate::math::sqrt(lo * hi), m));
    }
    let floor_val = 1e-300;
    let lx: Vec<f64> = envelope.iter().map(|e| crate::math::ln(1.0 + e.0)).collect();
    let ly: Vec<f64> = envelope.iter().map(|e| crate::math::ln(e.1.max(floor_val))).collect();
    let spatial_slope = slope(&lx, &ly);
    let spatial_ok = spatial_slope <= -(ps as f64) + 0.5;

    let exps = density.exponents();
    let predicted_exponent = match case {
        LocalizationCase::LowFrequency => exps.a_prime,
        LocalizationCase::HighFrequency => -exps.a.iter().sum::<f64>(),
    };
    let mut scale = Vec::with_capacity(opts.levels.len());
    let np = opts.box_points.max(2);
    let total = np.pow(d as u32);
    for &lev in &opts.levels {
        let jv = vec![sign * lev; d];
        let mut m = 0.0f64;
        for c in 0..total {
            let mut r = c;
            for xl in x.iter_mut() {
                let i = r % np;
                r /= np;
                *xl = -opts.box_half + 2.0 * opts.box_half * i as f64 / (np - 1) as f64;
            }
            m = m.max(compute_psi(density, alpha, &jv, b, &x, quad)?.abs());
        }
        scale.push((lev, m));
    }
    let sx: Vec<f64> = scale.iter().map(|s| s.0 as f64).collect();
    let sy: Vec<f64> = scale.iter().map(|s| log2(s.1.max(floor_val))).collect();
    let fitted_exponent = slope(&sx, &sy);
    let exponent_ok =
        (fitted_exponent - predicted_exponent).abs() <= 0.1 * predicted_exponent.abs();
    Ok(LocalizationReport {
        p_star: ps,
        envelope,
        spatial_slope,
        spatial_ok,
        scale,
        fitted_exponent,
        predicted_exponent,
        exponent_ok,
    })
}
