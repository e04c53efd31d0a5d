//! Random coefficients `ε_{α,J,K} = Re ∫ conj(ψ̂_{α,J,K}) dM̃_α`.
//!
//! For `α < 2` all coefficients are functionals of one shared LePage
//! stream `(Γ_m, κ^m, g_m)`:
//!
//! ```text
//! ε_{α,J,K} = Re{ a(α) Σ_m g_m Γ_m^{-1/α} φ(κ^m)^{-1/α} conj ψ̂_{α,J,K}(κ^m) }
//! ```
//!
//! with `Γ_m` the arrival times of a unit Poisson process, `κ^m` i.i.d. with
//! density `φ(ξ) = (ε/4)^d Π |ξ_l|^{-1} (1 + |log|ξ_l||)^{-1-ε}`, and `g_m`
//! i.i.d. rotation-invariant complex Gaussians scaled so `E|Re g|^α = 1`.
//! Each `ε_{α,J,K}` is then SαS with scale `‖ψ̂¹‖^d_{L^α}`.
//!
//! After `M` terms the series is truncated.  Conditionally on the stream the
//! discarded tail is a centred Gaussian whose covariance, averaged over the
//! points beyond `Γ_M`, is `a² E|g|² (Γ_M^{1-2/α}/(2/α-1)) ∫ φ^{1-2/α}
//! conj ψ̂ ψ̂'`.  [`Remainder::Gaussian`] adds that tail as an integral against
//! complex white noise, expanded in the exponential basis of each band; the
//! white-noise variates are counter-based functions of `(seed, J, sign, N)`.
//! For `α` near 2 the plain truncation converges like `M^{1-2/α}` and is
//! useless in practice without this term.
//!
//! For `α = 2` the coefficients are i.i.d. `N(0, 2(2π)^d)` (the atoms are
//! orthogonal), drawn from a counter-based generator keyed by `(seed, J, K)`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, invalid, Error, Result};
use crate::math::{cos, exp, exp2, floor, ln, log2, powf, sincos, sqrt, tgamma, PI, TAU};
use crate::quadrature::{GaussLegendre, Rule};
use crate::rng::{counter_normal_pair, StreamRng, DOMAIN_GAUSSIAN_COEFF, DOMAIN_REMAINDER};
use crate::wavelet::{check_alpha, meyer_hat, MeyerProfile, LAMBDA_HI, LAMBDA_LO, LAMBDA_MID};
use crate::{Complex64, MAX_DIM};

/// `a(α) = (∫₀^∞ x^{-α} sin x dx)^{-1/α} = (Γ(1-α) cos(πα/2))^{-1/α}`, with
/// `a(1) = 2/π`.
pub fn lepage_constant(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha >= 2.0 {
        return Err(invalid("the LePage series is used for alpha < 2 only"));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Ok(2.0 / PI);
    }
    let integral = tgamma(1.0 - alpha) * cos(0.5 * PI * alpha);
    Ok(powf(integral, -1.0 / alpha))
}

/// `σ_α` making `E|Re g|^α = 1` for `g = σ_α (Z₁ + i Z₂)`:
/// `σ_α = (2^{α/2} Γ((α+1)/2) / √π)^{-1/α}`.
pub fn gaussian_scale(alpha: f64) -> f64 {
    powf(powf(2.0, 0.5 * alpha) * tgamma(0.5 * (alpha + 1.0)) / sqrt(PI), -1.0 / alpha)
}

/// `log φ(ξ)` from `log|ξ_l|` per axis.
pub fn log_phi_from_logs(eps: f64, log_abs: &[f64]) -> f64 {
    let d = log_abs.len() as f64;
    let mut s = d * ln(0.25 * eps);
    for &y in log_abs {
        s -= y + (1.0 + eps) * ln(1.0 + y.abs());
    }
    s
}

/// `φ(ξ)`.
pub fn phi_density(eps: f64, xi: &[f64]) -> f64 {
    let logs: Vec<f64> = xi.iter().map(|x| ln(x.abs())).collect();
    exp(log_phi_from_logs(eps, &logs))
}

/// Treatment of the discarded LePage tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Remainder {
    /// Plain truncation after `M` terms.
    Truncate,
    /// Add the conditionally Gaussian approximation of the tail.
    Gaussian,
}

/// Parameters of the LePage stream.
#[derive(Debug, Clone, PartialEq)]
pub struct LePageParams {
    /// Stability index, `0 < α < 2`.
    pub alpha: f64,
    /// Spatial dimension.
    pub d: usize,
    /// Number of series terms `M`.
    pub terms: usize,
    /// Tail parameter `ε` of `φ`.
    pub eps_phi: f64,
    /// Tail treatment.
    pub remainder: Remainder,
    /// Largest `|j_l|` served by the band index.
    pub max_level: i32,
}

impl LePageParams {
    /// Defaults: `M = 10⁶` for d = 1 and `10⁵·4^{d-1}` otherwise (capped at
    /// `4·10⁶`); `ε = 0.5`; Gaussian remainder; bands `|j| ≤ 40`.
    pub fn new(alpha: f64, d: usize) -> Result<Self> {
        let p = LePageParams {
            alpha,
            d,
            terms: if d <= 1 { 1_000_000 } else { (100_000usize << (2 * (d.min(MAX_DIM) - 1))).min(4_000_000) },
            eps_phi: 0.5,
            remainder: Remainder::Gaussian,
            max_level: 40,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.alpha >= 2.0 {
            return Err(invalid("LePage streams need alpha < 2"));
        }
        if self.d == 0 || self.d > MAX_DIM {
            return Err(invalid("dimension must be 1, 2 or 3"));
        }
        if self.terms == 0 {
            return Err(invalid("at least one LePage term is required"));
        }
        if !(self.eps_phi > 0.0) {
            return Err(invalid("phi tail parameter must be positive"));
        }
        if self.max_level < 0 || self.max_level > 900 {
            return Err(invalid("max_level must lie in [0, 900]"));
        }
        Ok(())
    }
}

/// Exponential-basis filters of the white-noise tail term, one per band.
///
/// `c^{j}_m = (2π)^{-1/2} ∫_{2π/3}^{8π/3} e^{imλ} conj ψ̂¹(λ) w(2^j λ) dλ`,
/// `w = φ₁^{1/2 - 1/α}`; the negative half band uses `conj(c^j_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RemainderFilters {
    /// Lowest band index.
    pub j_min: i32,
    /// `taps[j - j_min][m + half[j - j_min]]`.
    pub taps: Vec<Vec<Complex64>>,
    /// Filter half length per band.
    pub half: Vec<usize>,
    /// Relative energy discarded by the truncation, per band.
    pub discarded: Vec<f64>,
}

impl RemainderFilters {
    /// Filters for bands `|j| ≤ max_level`, truncated where the discarded
    /// energy is below `1e-12` of the total (at most 160 taps per side; the
    /// bands straddling `|ξ| = 1`, where `φ` has a kink, reach that cap).
    pub fn new(alpha: f64, eps: f64, max_level: i32) -> Self {
        let base = GaussLegendre::new(16);
        let mut rule = Rule::composite(LAMBDA_LO, LAMBDA_MID, 24, &base);
        rule.push_composite(LAMBDA_MID, LAMBDA_HI, 48, &base);
        let probe = 160usize;
        let expo = 0.5 - 1.0 / alpha;
        let mut all = Vec::new();
        let mut half = Vec::new();
        let mut discarded = Vec::new();
        for j in -max_level..=max_level {
            let s = exp2(j as f64);
            let g: Vec<Complex64> = rule
                .x
                .iter()
                .zip(&rule.w)
                .map(|(&lam, &w)| {
                    let y = ln(s * lam);
                    let lw = expo * log_phi_from_logs(eps, &[y]);
                    meyer_hat(lam).conj() * (w * exp(lw) / sqrt(TAU))
                })
                .collect();
            let taps: Vec<Complex64> = (-(probe as i64)..=probe as i64)
                .map(|m| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (lam, gv) in rule.x.iter().zip(&g) {
                        let (sn, cs) = sincos(m as f64 * lam);
                        acc += Complex64::new(cs, sn) * *gv;
                    }
                    acc
                })
                .collect();
            let total: f64 = taps.iter().map(|z| z.norm_sqr()).sum();
            let mut h = probe;
            let mut tail = 0.0;
            while h > 0 {
                let e = taps[probe - h].norm_sqr() + taps[probe + h].norm_sqr();
                if tail + e > 1e-12 * total {
                    break;
                }
                tail += e;
                h -= 1;
            }
            half.push(h);
            discarded.push(tail / total);
            all.push(taps[probe - h..=probe + h].to_vec());
        }
        RemainderFilters { j_min: -max_level, taps: all, half, discarded }
    }

    fn band(&self, j: i32) -> (&[Complex64], usize) {
        let i = (j - self.j_min) as usize;
        (&self.taps[i], self.half[i])
    }
}

/// Reusable sampler: parameters plus precomputed remainder filters.
#[derive(Debug, Clone)]
pub struct LePageSampler {
    params: LePageParams,
    a: f64,
    sigma_g: f64,
    filters: Arc<RemainderFilters>,
}

impl LePageSampler {
    /// Validate parameters and precompute the remainder filters.
    pub fn new(params: LePageParams) -> Result<Self> {
        params.validate()?;
        let a = lepage_constant(params.alpha)?;
        // Built in both modes: plain truncation still reports its tail size.
        let filters =
            Arc::new(RemainderFilters::new(params.alpha, params.eps_phi, params.max_level));
        Ok(LePageSampler { sigma_g: gaussian_scale(params.alpha), params, a, filters })
    }

    /// Parameters.
    pub fn params(&self) -> &LePageParams {
        &self.params
    }

    /// Draw the shared stream for `seed`.  The draw order is fixed: for each
    /// `m`, one exponential increment, then `d` coordinates of `κ^m`, then the
    /// Gaussian pair of `g_m`.
    pub fn sample_stream(&self, seed: u64) -> LePageStream {
        let p = &self.params;
        let d = p.d;
        let inv_alpha = 1.0 / p.alpha;
        let mut rng = StreamRng::new(seed);
        let mut gamma = 0.0;
        let mut kappa = Vec::with_capacity(p.terms * d);
        let mut weight = Vec::with_capacity(p.terms);
        let mut buckets: BTreeMap<[i32; MAX_DIM], Vec<u32>> = BTreeMap::new();
        let mut logs = [0.0f64; MAX_DIM];
        let mut cands: [[i32; 3]; MAX_DIM] = [[0; 3]; MAX_DIM];
        let mut ncand = [0usize; MAX_DIM];
        let log_pi3 = log2(PI / 3.0);
        for m in 0..p.terms {
            gamma += rng.exp1();
            let mut finite = true;
            for l in 0..d {
                let u = rng.unit();
                let bits = rng.word();
                let y = powf(u, -1.0 / p.eps_phi) - 1.0;
                let y = if bits & 1 == 0 { y } else { -y };
                let sign = if bits & 2 == 0 { 1.0 } else { -1.0 };
                logs[l] = y;
                let x = sign * exp(y);
                finite &= x.is_finite() && x != 0.0;
                kappa.push(x);
            }
            let (z1, z2) = rng.normal_pair();
            let mut w = Complex64::new(0.0, 0.0);
            if finite {
                let lphi = log_phi_from_logs(p.eps_phi, &logs[..d]);
                let mag = self.a * self.sigma_g * exp(-inv_alpha * (ln(gamma) + lphi));
                w = Complex64::new(z1 * mag, z2 * mag);
                // Bands containing each coordinate: j + 1 ≤ log2(3|x|/π) ≤ j + 3.
                for l in 0..d {
                    let big_l = logs[l] / core::f64::consts::LN_2 - log_pi3;
                    ncand[l] = 0;
                    let lo = crate::math::ceil(big_l - 3.0);
                    let hi = floor(big_l - 1.0);
                    let mut j = lo;
                    while j <= hi {
                        if j.abs() <= p.max_level as f64 {
                            cands[l][ncand[l]] = j as i32;
                            ncand[l] += 1;
                        }
                        j += 1.0;
                    }
                }
                let combos: usize = ncand[..d].iter().product();
                for c in 0..combos {
                    let mut key = [0i32; MAX_DIM];
                    let mut r = c;
                    for l in 0..d {
                        key[l] = cands[l][r % ncand[l]];
                        r /= ncand[l];
                    }
                    buckets.entry(key).or_default().push(m as u32);
                }
            }
            weight.push(w);
        }
        let remainder_scale = match p.remainder {
            Remainder::Gaussian => {
                let e = 2.0 / p.alpha - 1.0;
                let s = powf(gamma, -e) / e;
                self.a * self.sigma_g * sqrt(2.0) * sqrt(s)
            }
            Remainder::Truncate => 0.0,
        };
        // Scale for reporting the size of the discarded tail.
        let tail_scale = {
            let e = 2.0 / p.alpha - 1.0;
            self.a * self.sigma_g * sqrt(2.0) * sqrt(powf(gamma, -e) / e)
        };
        let filters = self.filters.clone();
        LePageStream {
            params: p.clone(),
            seed,
            gamma_last: gamma,
            kappa,
            weight,
            buckets,
            remainder_scale,
            tail_scale,
            filters,
        }
    }
}

/// One realisation of the shared LePage randomness.
#[derive(Debug, Clone)]
pub struct LePageStream {
    params: LePageParams,
    seed: u64,
    gamma_last: f64,
    kappa: Vec<f64>,
    weight: Vec<Complex64>,
    buckets: BTreeMap<[i32; MAX_DIM], Vec<u32>>,
    remainder_scale: f64,
    tail_scale: f64,
    filters: Arc<RemainderFilters>,
}

/// A coefficient together with the size of the discarded series tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    /// `ε_{α,J,K}`.
    pub value: f64,
    /// Standard deviation of the discarded tail (of its real part).
    pub truncation_std: f64,
}

/// Anything that can produce blocks of coefficients `ε_{α,J,K}`.
pub trait CoefficientSource: Send + Sync {
    /// Spatial dimension.
    fn dim(&self) -> usize;
    /// Stability index.
    fn alpha(&self) -> f64;
    /// Coefficients for `K ∈ [lo, hi]` (inclusive box), row-major in `K`.
    fn coefficient_box(&self, j: &[i32], lo: &[i64], hi: &[i64]) -> Result<Vec<f64>>;
}

/// `e^{i k λ}` for `k ∈ [lo, hi]`, exact at multiples of 32 and advanced by
/// repeated multiplication in between; each entry depends only on `(k, λ)`.
fn phasors(lo: i64, hi: i64, lambda: f64, out: &mut Vec<Complex64>) {
    out.clear();
    let (s, c) = sincos(lambda);
    let step = Complex64::new(c, s);
    let k0 = lo.div_euclid(32) * 32;
    let mut z = Complex64::new(1.0, 0.0);
    let mut k = k0;
    while k <= hi {
        if k.rem_euclid(32) == 0 {
            let (s, c) = sincos(k as f64 * lambda);
            z = Complex64::new(c, s);
        } else {
            z *= step;
        }
        if k >= lo {
            out.push(z);
        }
        k += 1;
    }
}

fn box_len(lo: &[i64], hi: &[i64]) -> Result<usize> {
    let mut n = 1usize;
    for (a, b) in lo.iter().zip(hi) {
        if b < a {
            return Err(invalid("empty coefficient box"));
        }
        n = n
            .checked_mul((b - a + 1) as usize)
            .ok_or_else(|| invalid("coefficient box too large"))?;
    }
    Ok(n)
}

impl LePageStream {
    /// Seed of the stream.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Parameters of the stream.
    pub fn params(&self) -> &LePageParams {
        &self.params
    }

    /// `Γ_M`, the last arrival time.
    pub fn gamma_last(&self) -> f64 {
        self.gamma_last
    }

    /// Frequency points `κ^m`, `d` coordinates per term, in draw order.
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// Number of stream points whose frequency falls in band `J`.
    pub fn band_population(&self, j: &[i32]) -> usize {
        let mut key = [0i32; MAX_DIM];
        key[..j.len()].copy_from_slice(j);
        self.buckets.get(&key).map_or(0, |v| v.len())
    }

    fn key(&self, j: &[i32]) -> Result<[i32; MAX_DIM]> {
        check_dim(self.params.d, j.len())?;
        if j.iter().any(|v| v.abs() > self.params.max_level) {
            return Err(invalid(alloc::format!(
                "band {:?} beyond the indexed range |j| <= {}",
                j,
                self.params.max_level
            )));
        }
        let mut key = [0i32; MAX_DIM];
        key[..j.len()].copy_from_slice(j);
        Ok(key)
    }

    /// `ε_{α,J,K}` and the size of the discarded tail.
    pub fn epsilon(&self, j: &[i32], k: &[i64]) -> Result<Coefficient> {
        let v = self.coefficient_box(j, k, k)?;
        Ok(Coefficient { value: v[0], truncation_std: self.truncation_std(j)? })
    }

    /// Standard deviation of the real part of the discarded tail for band `J`
    /// (it does not depend on `K`).
    pub fn truncation_std(&self, j: &[i32]) -> Result<f64> {
        self.key(j)?;
        let f = &self.filters;
        let mut s = self.tail_scale / sqrt(2.0);
        for &jl in j {
            let e: f64 = f.band(jl).0.iter().map(|z| z.norm_sqr()).sum();
            s *= exp2(jl as f64 * (0.5 - 1.0 / self.params.alpha)) * sqrt(2.0 * e);
        }
        Ok(s)
    }

    fn main_sum(&self, j: &[i32], lo: &[i64], hi: &[i64], out: &mut [Complex64]) -> Result<()> {
        let d = self.params.d;
        let key = self.key(j)?;
        let Some(ms) = self.buckets.get(&key) else {
            return Ok(());
        };
        let inv_alpha = 1.0 / self.params.alpha;
        let mut pre = 1.0;
        let mut scale = [0.0f64; MAX_DIM];
        for l in 0..d {
            scale[l] = exp2(-(j[l] as f64));
            pre *= exp2(-(j[l] as f64) * inv_alpha);
        }
        let mut rows: Vec<Vec<Complex64>> = vec![Vec::new(); d];
        let n = out.len();
        let mut prod = vec![Complex64::new(0.0, 0.0); n];
        for &m in ms {
            let m = m as usize;
            let mut base = self.weight[m] * pre;
            for l in 0..d {
                let lam = scale[l] * self.kappa[m * d + l];
                base *= meyer_hat(lam).conj();
                phasors(lo[l], hi[l], lam, &mut rows[l]);
            }
            if base.re == 0.0 && base.im == 0.0 {
                continue;
            }
            // Tensor product of the per-axis phasor rows, row-major in K.
            if d == 1 {
                for (o, p) in out.iter_mut().zip(&rows[0]) {
                    *o += base * *p;
                }
            } else {
                for (c, slot) in prod.iter_mut().enumerate() {
                    let mut r = c;
                    let mut z = base;
                    for l in (0..d).rev() {
                        let len = rows[l].len();
                        z *= rows[l][r % len];
                        r /= len;
                    }
                    *slot = z;
                }
                for (o, p) in out.iter_mut().zip(&prod) {
                    *o += *p;
                }
            }
        }
        Ok(())
    }

    fn remainder_sum(
        &self,
        j: &[i32],
        lo: &[i64],
        hi: &[i64],
        out: &mut [Complex64],
    ) -> Result<()> {
        if self.params.remainder != Remainder::Gaussian || self.remainder_scale == 0.0 {
            return Ok(());
        }
        let d = self.params.d;
        let f = &self.filters;
        let hs: Vec<i64> = j.iter().map(|&jl| f.band(jl).1 as i64).collect();
        let mut amp = self.remainder_scale;
        for &jl in j {
            amp *= exp2(jl as f64 * (0.5 - 1.0 / self.params.alpha));
        }
        // Noise grid N ∈ [lo - h, hi + h] per axis, for each sign pattern.
        let nlo: Vec<i64> = lo.iter().zip(&hs).map(|(v, h)| v - h).collect();
        let nhi: Vec<i64> = hi.iter().zip(&hs).map(|(v, h)| v + h).collect();
        let nlen: Vec<usize> = nlo.iter().zip(&nhi).map(|(a, b)| (b - a + 1) as usize).collect();
        let nnoise: usize = nlen.iter().product();
        let klen: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| (b - a + 1) as usize).collect();
        let mut noise = vec![Complex64::new(0.0, 0.0); nnoise];
        let mut key = Vec::with_capacity(2 * d + 2);
        for sigma in 0..(1usize << d) {
            for (c, z) in noise.iter_mut().enumerate() {
                let mut r = c;
                let mut nidx = [0i64; MAX_DIM];
                for l in (0..d).rev() {
                    nidx[l] = nlo[l] + (r % nlen[l]) as i64;
                    r /= nlen[l];
                }
                key.clear();
                key.push(d as i64);
                key.extend(j.iter().map(|&v| v as i64));
                key.push(sigma as i64);
                key.extend_from_slice(&nidx[..d]);
                let (a, b) = counter_normal_pair(self.seed, DOMAIN_REMAINDER, &key);
                *z = Complex64::new(a, b) * core::f64::consts::FRAC_1_SQRT_2;
            }
            // Separable convolution: contract one axis at a time.
            let mut data = noise.clone();
            let mut shape = nlen.clone();
            for l in 0..d {
                let (taps, h) = f.band(j[l]);
                let h = h as i64;
                let neg = (sigma >> l) & 1 == 1;
                let outer: usize = shape[..l].iter().product();
                let inner: usize = shape[l + 1..].iter().product();
                let mut next = vec![Complex64::new(0.0, 0.0); outer * klen[l] * inner];
                for o in 0..outer {
                    for kk in 0..klen[l] {
                        // term: c_{k - n} Z_n for n = k - m, m ∈ [-h, h]
                        for (ti, tap) in taps.iter().enumerate() {
                            let m = ti as i64 - h;
                            let n_off = (kk as i64 + h - m) as usize;
                            let c = if neg { tap.conj() } else { *tap };
                            let src = &data[(o * shape[l] + n_off) * inner..][..inner];
                            let dst = &mut next[(o * klen[l] + kk) * inner..][..inner];
                            for (dv, sv) in dst.iter_mut().zip(src) {
                                *dv += c * *sv;
                            }
                        }
                    }
                }
                shape[l] = klen[l];
                data = next;
            }
            for (o, v) in out.iter_mut().zip(&data) {
                *o += *v * amp;
            }
        }
        Ok(())
    }
}

impl CoefficientSource for LePageStream {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn alpha(&self) -> f64 {
        self.params.alpha
    }

    fn coefficient_box(&self, j: &[i32], lo: &[i64], hi: &[i64]) -> Result<Vec<f64>> {
        let d = self.params.d;
        check_dim(d, lo.len())?;
        check_dim(d, hi.len())?;
        let n = box_len(lo, hi)?;
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        self.main_sum(j, lo, hi, &mut acc)?;
        self.remainder_sum(j, lo, hi, &mut acc)?;
        Ok(acc.iter().map(|z| z.re).collect())
    }
}

/// I.i.d. Gaussian coefficients for `α = 2`: `ε_{J,K} ~ N(0, 2(2π)^d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianCoefficients {
    /// Seed.
    pub seed: u64,
    /// Spatial dimension.
    pub d: usize,
}

/// `ε_{2,J,K}` drawn from the counter-based generator keyed by `(seed, J, K)`.
pub fn gaussian_epsilon(seed: u64, j: &[i32], k: &[i64]) -> Result<f64> {
    check_dim(j.len(), k.len())?;
    let d = j.len();
    if d == 0 || d > MAX_DIM {
        return Err(invalid("dimension must be 1, 2 or 3"));
    }
    let mut key = [0i64; 2 * MAX_DIM + 1];
    key[0] = d as i64;
    for l in 0..d {
        key[1 + l] = j[l] as i64;
        key[1 + d + l] = k[l];
    }
    let (z, _) = counter_normal_pair(seed, DOMAIN_GAUSSIAN_COEFF, &key[..2 * d + 1]);
    Ok(z * sqrt(2.0 * powf(TAU, d as f64)))
}

impl CoefficientSource for GaussianCoefficients {
    fn dim(&self) -> usize {
        self.d
    }

    fn alpha(&self) -> f64 {
        2.0
    }

    fn coefficient_box(&self, j: &[i32], lo: &[i64], hi: &[i64]) -> Result<Vec<f64>> {
        check_dim(self.d, j.len())?;
        check_dim(self.d, lo.len())?;
        check_dim(self.d, hi.len())?;
        let n = box_len(lo, hi)?;
        let mut out = Vec::with_capacity(n);
        let mut k = [0i64; MAX_DIM];
        for c in 0..n {
            let mut r = c;
            for l in (0..self.d).rev() {
                let len = (hi[l] - lo[l] + 1) as usize;
                k[l] = lo[l] + (r % len) as i64;
                r /= len;
            }
            out.push(gaussian_epsilon(self.seed, j, &k[..self.d])?);
        }
        Ok(out)
    }
}

/// Almost-sure envelope of `|ε_{α,J,K}|`:
/// `Π(1+|j_l|)^{1/α+δ}` for `α < 1`, times `√log(3 + Σ(|j_l|+|k_l|))` for
/// `1 ≤ α < 2`, and the square root alone for `α = 2`.
pub fn envelope(alpha: f64, delta: f64, j: &[i32], k: &[i64]) -> f64 {
    let s: f64 = j.iter().zip(k).map(|(a, b)| a.unsigned_abs() as f64 + b.unsigned_abs() as f64).sum();
    let lg = sqrt(ln(3.0 + s));
    if alpha >= 2.0 {
        return lg;
    }
    let mut p = 1.0;
    for &jl in j {
        p *= powf(1.0 + jl.unsigned_abs() as f64, 1.0 / alpha + delta);
    }
    if alpha < 1.0 {
        p
    } else {
        p * lg
    }
}

/// Outcome of [`envelope_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    /// `sup |ε| / envelope` on the base sample.
    pub sup_base: f64,
    /// The same on the fourfold enlarged sample.
    pub sup_enlarged: f64,
    /// Number of coefficients in each sample.
    pub samples: (usize, usize),
    /// `sup_enlarged ≤ 1.25 · sup_base`.
    pub stable: bool,
}

/// Compare `sup |ε_{α,J,K}| / envelope` over `|j_l| ≤ j_radius`,
/// `|k_l| ≤ k_radius` with the same supremum over a sample four times as
/// large (larger `K` box).
pub fn envelope_check(
    source: &dyn CoefficientSource,
    delta: f64,
    j_radius: i32,
    k_radius: i64,
) -> Result<EnvelopeReport> {
    let d = source.dim();
    let alpha = source.alpha();
    let grow = powf(4.0, 1.0 / d as f64);
    let k_big = crate::math::ceil(((2 * k_radius + 1) as f64 * grow - 1.0) / 2.0) as i64;
    let run = |kr: i64| -> Result<(f64, usize)> {
        let mut sup = 0.0f64;
        let mut count = 0;
        let nj = (2 * j_radius + 1) as usize;
        let total = nj.pow(d as u32);
        let lo = vec![-kr; d];
        let hi = vec![kr; d];
        let side = (2 * kr + 1) as usize;
        for c in 0..total {
            let mut r = c;
            let mut j = vec![0i32; d];
            for jl in j.iter_mut() {
                *jl = (r % nj) as i32 - j_radius;
                r /= nj;
            }
            let vals = source.coefficient_box(&j, &lo, &hi)?;
            for (i, v) in vals.iter().enumerate() {
                let mut r = i;
                let mut k = vec![0i64; d];
                for l in (0..d).rev() {
                    k[l] = (r % side) as i64 - kr;
                    r /= side;
                }
                sup = sup.max(v.abs() / envelope(alpha, delta, &j, &k));
                count += 1;
            }
        }
        Ok((sup, count))
    };
    let (sup_base, n0) = run(k_radius)?;
    let (sup_enlarged, n1) = run(k_big)?;
    if !sup_base.is_finite() || !sup_enlarged.is_finite() {
        return Err(Error::NoConvergence("non-finite coefficient".into()));
    }
    Ok(EnvelopeReport {
        sup_base,
        sup_enlarged,
        samples: (n0, n1),
        stable: sup_enlarged <= 1.25 * sup_base,
    })
}

/// Modulus of the profile, re-exported for diagnostics.
pub fn profile_modulus(lambda: f64) -> f64 {
    MeyerProfile.modulus(lambda)
}

/// Convenience: draw a stream for `seed` with `params`.
pub fn sample_stream(seed: u64, params: &LePageParams) -> Result<LePageStream> {
    Ok(LePageSampler::new(params.clone())?.sample_stream(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((lepage_constant(1.0).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((lepage_constant(0.5).unwrap() - 2.0 / PI).abs() < 1e-12);
        // σ_α makes E|Re g|^α = 1; at α = 2 this is E (σZ)² = 1.
        assert!((gaussian_scale(2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phasors_depend_only_on_index() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        phasors(-40, 70, 1.2345, &mut a);
        phasors(5, 9, 1.2345, &mut b);
        assert_eq!(&a[45..50], &b[..]);
    }
}
