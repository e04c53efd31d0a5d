//! Verification routines shared by the subcommands and the test suites.

use hsf_core::density::SpectralDensity;
use hsf_core::kernel::{compute_psi, compute_s_jk, QuadratureSpec};
use hsf_core::lattice::Lattice;
use hsf_core::lepage::{
    gaussian_epsilon, CoefficientSource, GaussianCoefficients, LePageParams, LePageSampler,
    Remainder,
};
use hsf_core::regularity::{
    directional_scan, infinity_scan, n0, rectangular_scan, IncrementScan, InfinityScan,
    RegularityReport, Verdict,
};
use hsf_core::rng::{mix64, StreamRng};
use hsf_core::synth::{FieldRealization, FrequencyBand, KernelBank, Synthesizer, TruncationPlan};
use hsf_core::wavelet::atom_quasi_norm;
use rayon::prelude::*;

use crate::config::{RegularitySection, ScanSpec};
use crate::error::Result;
use crate::ks::{ecf_sup_error, two_sample, KsResult};

/// Seed of the `i`-th auxiliary stream derived from `seed` in `domain`.
pub fn derived_seed(seed: u64, domain: u64, i: u64) -> u64 {
    mix64(mix64(seed ^ domain).wrapping_add(i))
}

const DOMAIN_LAW: u64 = 0x6c61_7773_616d_706c;
const DOMAIN_KERNEL: u64 = 0x6b65_726e_656c_6964;

/// Stream factory: LePage streams for `α < 2`, Gaussian coefficients for
/// `α = 2`.  Counts the streams it hands out.
#[derive(Debug)]
pub struct Sources {
    sampler: Option<LePageSampler>,
    alpha: f64,
    d: usize,
    created: u64,
}

impl Sources {
    /// `terms` is `M`; `eps` and `remainder` configure the stream.
    pub fn new(alpha: f64, d: usize, terms: usize, eps: f64, remainder: Remainder) -> Result<Self> {
        let sampler = if alpha < 2.0 {
            let mut p = LePageParams::new(alpha, d)?;
            p.terms = terms;
            p.eps_phi = eps;
            p.remainder = remainder;
            Some(LePageSampler::new(p)?)
        } else {
            None
        };
        Ok(Sources { sampler, alpha, d, created: 0 })
    }

    /// Coefficient source of one realisation.
    pub fn source(&mut self, seed: u64) -> Box<dyn CoefficientSource> {
        self.created += 1;
        match &self.sampler {
            Some(s) => Box::new(s.sample_stream(seed)),
            None => Box::new(GaussianCoefficients { seed, d: self.d }),
        }
    }

    /// `ε_{J,K}` of the stream with the given seed (one draw, for law checks).
    pub fn draw(&self, seed: u64, j: &[i32], k: &[i64]) -> Result<f64> {
        Ok(match &self.sampler {
            Some(s) => s.sample_stream(seed).epsilon(j, k)?.value,
            None => gaussian_epsilon(seed, j, k)?,
        })
    }

    /// Stability index.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Streams created so far (including law draws).
    pub fn created(&self) -> u64 {
        self.created
    }
}

/// One sampled kernel-identity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySample {
    pub j: Vec<i32>,
    pub k: Vec<i64>,
    pub t: Vec<f64>,
    /// `s_{J,K}(t)` from its defining integral.
    pub direct: f64,
    /// `Ψ_{2,J}(2^J t - K) - Ψ_{2,J}(-K)`.
    pub via_kernel: f64,
    /// `|direct - via_kernel| / max(|direct|, |Ψ(2^J t - K)|, |Ψ(-K)|)`.
    pub relative: f64,
}

/// Compare both evaluations of the field coefficients at random
/// `(J, K, t)`: `|j_l| ≤ j_abs_max`, `|k_l| ≤ 5`, `‖t‖ ≤ 2` (uniform in the
/// ball, by rejection).
pub fn kernel_identity(
    density: &dyn SpectralDensity,
    samples: usize,
    j_abs_max: i32,
    seed: u64,
) -> Result<Vec<IdentitySample>> {
    let d = density.dim();
    let quad = QuadratureSpec::default_for(d);
    let mut rng = StreamRng::new(derived_seed(seed, DOMAIN_KERNEL, 0));
    let span = (2 * j_abs_max + 1) as u64;
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let j: Vec<i32> = (0..d).map(|_| (rng.word() % span) as i32 - j_abs_max).collect();
        let k: Vec<i64> = (0..d).map(|_| (rng.word() % 11) as i64 - 5).collect();
        let t = loop {
            let t: Vec<f64> = (0..d).map(|_| 4.0 * rng.unit() - 2.0).collect();
            if t.iter().map(|x| x * x).sum::<f64>() <= 4.0 {
                break t;
            }
        };
        let x1: Vec<f64> = (0..d).map(|l| (j[l] as f64).exp2() * t[l] - k[l] as f64).collect();
        let x0: Vec<f64> = k.iter().map(|&kl| -(kl as f64)).collect();
        let zeros = vec![0u32; d];
        let p1 = compute_psi(density, 2.0, &j, &zeros, &x1, &quad)?;
        let p0 = compute_psi(density, 2.0, &j, &zeros, &x0, &quad)?;
        let direct = compute_s_jk(density, &j, &k, &t, &quad)?;
        let via_kernel = p1 - p0;
        let scale = direct.abs().max(p1.abs()).max(p0.abs());
        let relative = if scale == 0.0 { 0.0 } else { (direct - via_kernel).abs() / scale };
        out.push(IdentitySample { j, k, t, direct, via_kernel, relative });
    }
    Ok(out)
}

/// Outcome of [`coefficient_law`].
#[derive(Debug, Clone, PartialEq)]
pub struct LawCheck {
    /// `σ = ‖ψ̂¹‖_{L^α}^d`.
    pub sigma: f64,
    /// `sup_ζ |φ̂_{ε_{0,0}}(ζ) - exp(-σ^α|ζ|^α)|`.
    pub ecf_error: f64,
    /// `(ζ, Re φ̂, Im φ̂, target)` on the comparison grid.
    pub ecf_curve: Vec<[f64; 4]>,
    /// KS between `ε_{0,0}` and `ε_{(1,..,1),K}` (`K` varying) samples.
    pub ks: KsResult,
    /// Sample sizes `(ecf, ks)`.
    pub sizes: (usize, usize),
    /// Sample variance of `ε_{0,0}` (meaningful for `α = 2`).
    pub variance: f64,
}

/// Empirical law of the coefficients from independent streams: `n_ecf`
/// draws of `ε_{0,0}` and `n_ks` draws of `ε_{(1,..,1),K}` from further,
/// disjoint streams, `K = (i mod 9 - 4, 0, ...)`.
pub fn coefficient_law(
    sources: &Sources,
    seed: u64,
    n_ecf: usize,
    n_ks: usize,
    zeta_max: f64,
) -> Result<LawCheck> {
    let d = sources.d;
    let alpha = sources.alpha;
    let zero_j = vec![0i32; d];
    let zero_k = vec![0i64; d];
    let base: Vec<f64> = (0..n_ecf as u64)
        .into_par_iter()
        .map(|i| sources.draw(derived_seed(seed, DOMAIN_LAW, i), &zero_j, &zero_k))
        .collect::<Result<_>>()?;
    let ones = vec![1i32; d];
    let other: Vec<f64> = (0..n_ks as u64)
        .into_par_iter()
        .map(|i| {
            let mut k = vec![0i64; d];
            k[0] = (i % 9) as i64 - 4;
            sources.draw(derived_seed(seed, DOMAIN_LAW, n_ecf as u64 + i), &ones, &k)
        })
        .collect::<Result<_>>()?;
    let sigma = atom_quasi_norm(alpha, d)?;
    let sa = sigma.powf(alpha);
    let target = |z: f64| (-sa * z.abs().powf(alpha)).exp();
    let points = 61;
    let ecf_error = ecf_sup_error(&base, zeta_max, points, target);
    let n = base.len() as f64;
    let ecf_curve = (0..points)
        .map(|p| {
            let z = -zeta_max + 2.0 * zeta_max * p as f64 / (points - 1) as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for &x in &base {
                let (s, c) = (z * x).sin_cos();
                re += c;
                im += s;
            }
            [z, re / n, im / n, target(z)]
        })
        .collect();
    let ks_len = n_ks.min(base.len());
    let ks = two_sample(&base[..ks_len], &other);
    let mean = base.iter().sum::<f64>() / n;
    let variance = base.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Ok(LawCheck { sigma, ecf_error, ecf_curve, ks, sizes: (n_ecf, n_ks), variance })
}

/// A regularity scan together with the verdict it is expected to return.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    /// Label, e.g. `directional` or `directional-control`.
    pub label: String,
    pub report: RegularityReport,
    pub expected: Verdict,
}

impl ScanOutcome {
    /// Whether the verdict is the expected one.
    pub fn as_expected(&self) -> bool {
        self.report.verdict == self.expected
    }
}

/// Lattice of the increment scans: step `T 2^{-levels}`, covering
/// `[-T(1 + r/2), T(1 + r/2)]^d` where `r` is the largest increment order.
pub fn increment_lattice(d: usize, t: f64, levels: u32, reach: u32) -> Result<Lattice> {
    let per = (levels as f64).exp2();
    let n = (per * (1.0 + reach as f64 / 2.0)).ceil() as usize;
    Ok(Lattice::symmetric(d, n as f64 * t / per, n)?)
}

/// Lattice of the infinity scan: covers `[-2^shells, 2^shells]^d`.
pub fn infinity_lattice(d: usize, shells: u32, step: f64) -> Result<Lattice> {
    let r = (shells as f64).exp2();
    let n = (r / step - 1e-9).ceil() as usize;
    Ok(Lattice::symmetric(d, n as f64 * step, n)?)
}

/// Run the scans selected in `section` over `section.seeds` realisations
/// (seeds `seed, seed + 1, ...`).
pub fn regularity_scans(
    density: &dyn SpectralDensity,
    alpha: f64,
    seed: u64,
    k_margin: i64,
    section: &RegularitySection,
    sources: &mut Sources,
) -> Result<Vec<ScanOutcome>> {
    let d = density.dim();
    let exps = density.exponents().clone();
    let b = section.b.clone().unwrap_or_else(|| vec![1; d]);
    let n = section.n.unwrap_or_else(|| n0(&exps.a).max(1) as u32);
    let band = match &section.band {
        Some(e) => Some(FrequencyBand::new(e.clone())?),
        None => None,
    };
    let wants = |s: ScanSpec| section.scans.contains(&s);
    let increments = wants(ScanSpec::Directional) || wants(ScanSpec::Rectangular);
    let synth = |bank: &KernelBank,
                 src: &dyn CoefficientSource,
                 plan: &TruncationPlan,
                 lat: &Lattice|
     -> Result<FieldRealization> {
        let s = Synthesizer::new(bank, src, plan.clone())?;
        Ok(match &band {
            Some(bd) => s.synthesize_band(bd, lat)?,
            None => s.synthesize_full(lat)?,
        })
    };
    let zeros = vec![0u32; d];
    let plan_inc = TruncationPlan { j_abs_max: section.j_abs_max, k_margin };
    let plan_inf = TruncationPlan { j_abs_max: section.infinity_j_abs_max, k_margin };
    let bank_inc = if increments {
        Some(KernelBank::for_plan(density, alpha, &zeros, &plan_inc)?)
    } else {
        None
    };
    let bank_inf = if wants(ScanSpec::Infinity) {
        Some(KernelBank::for_plan(density, alpha, &zeros, &plan_inf)?)
    } else {
        None
    };
    let reach = b.iter().sum::<u32>().max(n);
    let lat_inc = increment_lattice(d, section.t, section.levels, reach)?;
    let lat_inf = infinity_lattice(d, section.shells, section.infinity_step)?;
    let mut inc = Vec::new();
    let mut inf = Vec::new();
    for i in 0..section.seeds as u64 {
        let src = sources.source(seed.wrapping_add(i));
        if let Some(bank) = &bank_inc {
            inc.push(synth(bank, src.as_ref(), &plan_inc, &lat_inc)?);
        }
        if let Some(bank) = &bank_inf {
            inf.push(synth(bank, src.as_ref(), &plan_inf, &lat_inf)?);
        }
    }
    let mut out = Vec::new();
    let mut exponent_sets = vec![(String::new(), exps.a.clone(), Verdict::BoundedTrend)];
    if let Some(off) = section.control_offset {
        let wrong = exps.a.iter().map(|a| a + off).collect();
        exponent_sets.push(("-control".to_string(), wrong, Verdict::Diverging));
    }
    for (suffix, a, expected) in &exponent_sets {
        let mut opts = IncrementScan::new(section.t, a.clone(), alpha);
        opts.levels = section.levels;
        opts.delta = section.delta;
        if wants(ScanSpec::Directional) {
            out.push(ScanOutcome {
                label: format!("directional{suffix}"),
                report: directional_scan(&inc, &b, &opts)?,
                expected: *expected,
            });
        }
        if wants(ScanSpec::Rectangular) {
            out.push(ScanOutcome {
                label: format!("rectangular{suffix}"),
                report: rectangular_scan(&inc, n, &opts)?,
                expected: *expected,
            });
        }
    }
    if wants(ScanSpec::Infinity) {
        let mut opts = InfinityScan::new(exps.a_prime, alpha);
        opts.shells = section.shells;
        opts.delta = section.delta;
        out.push(ScanOutcome {
            label: "infinity".into(),
            report: infinity_scan(&inf, &opts)?,
            expected: Verdict::BoundedTrend,
        });
    }
    Ok(out)
}
