//! Run configuration: one TOML file describes a complete, reproducible run.
//!
//! Unknown keys are rejected everywhere.  Every optional section has
//! defaults; [`RunConfig::canonical`] fills them in so that
//! `parse(serialize(c)) == c` holds on the canonical form.
//!
//! ```toml
//! alpha = 1.5
//! d = 1
//! seed = 7
//! output_dir = "out"
//! run = ["synth", "verify-lemmas"]
//!
//! [density]
//! kind = "builtin"
//! u = 0.3
//! v = [1.0]
//!
//! [lattice]
//! origin = [-2.0]
//! step = [0.0078125]
//! counts = [513]
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A subcommand of the runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Full-field realisations.
    Synth,
    /// Band decomposition `X = Σ_η X^η`.
    Bands,
    /// Partial-derivative fields.
    Derivs,
    /// Kernel identity, localisation and admissibility checks.
    VerifyKernels,
    /// Coefficient law and envelope checks.
    VerifyCoeffs,
    /// Increment and growth scans.
    VerifyRegularity,
    /// Deterministic lemma oracles (no random numbers).
    VerifyLemmas,
    /// Frame reconstruction error.
    FrameCheck,
}

impl Command {
    /// All commands in execution order.
    pub const ALL: [Command; 8] = [
        Command::Synth,
        Command::Bands,
        Command::Derivs,
        Command::VerifyKernels,
        Command::VerifyCoeffs,
        Command::VerifyRegularity,
        Command::VerifyLemmas,
        Command::FrameCheck,
    ];

    /// Kebab-case name, also the artifact sub-directory.
    pub fn name(self) -> &'static str {
        match self {
            Command::Synth => "synth",
            Command::Bands => "bands",
            Command::Derivs => "derivs",
            Command::VerifyKernels => "verify-kernels",
            Command::VerifyCoeffs => "verify-coeffs",
            Command::VerifyRegularity => "verify-regularity",
            Command::VerifyLemmas => "verify-lemmas",
            Command::FrameCheck => "frame-check",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Spectral density source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    /// `‖ξ‖^{-(u + d/α)} Π (1+|ξ_l|)^{-v_l}`.
    Builtin {
        u: f64,
        v: Vec<f64>,
        /// Override of the declared `a'` (default `u`).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_prime: Option<f64>,
        /// Override of the declared `a` (default `v_l + u/d`).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<Vec<f64>>,
    },
    /// Radial table `r  f(r)` (whitespace separated, `#` comments),
    /// interpolated log-log and extended by the end-segment power laws.
    Table {
        /// Path, relative to the configuration file's directory.
        path: PathBuf,
        a_prime: f64,
        a: Vec<f64>,
    },
}

/// Tail treatment of the LePage series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemainderSpec {
    Truncate,
    Gaussian,
}

/// LePage stream parameters (ignored for `α = 2`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LePageSection {
    #[serde(default = "default_eps")]
    pub epsilon_phi: f64,
    /// `M`; dimension-dependent default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<usize>,
    #[serde(default = "default_remainder")]
    pub remainder: RemainderSpec,
}

fn default_eps() -> f64 {
    0.5
}

fn default_remainder() -> RemainderSpec {
    RemainderSpec::Gaussian
}

impl Default for LePageSection {
    fn default() -> Self {
        LePageSection { epsilon_phi: default_eps(), terms: None, remainder: default_remainder() }
    }
}

/// Truncation plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSection {
    pub j_abs_max: i32,
    pub k_margin: i64,
}

/// Evaluation lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub origin: Vec<f64>,
    pub step: Vec<f64>,
    pub counts: Vec<usize>,
}

/// `synth`, `bands` and `derivs` options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    /// Number of full-field realisations (seeds `seed, seed+1, ...`).
    #[serde(default = "one")]
    pub realizations: usize,
    /// Derivative order for `derivs` (default all ones).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<u32>>,
}

fn one() -> usize {
    1
}

impl Default for SynthSection {
    fn default() -> Self {
        SynthSection { realizations: 1, b: None }
    }
}

/// `verify-kernels` options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    /// Random `(J, K, t)` triples for the kernel identity.
    #[serde(default = "default_kernel_samples")]
    pub samples: usize,
    /// Largest `|j_l|` of the sampled scales.
    #[serde(default = "default_kernel_j")]
    pub j_abs_max: i32,
    /// Run the localisation fits (d = 1 only).
    #[serde(default = "yes")]
    pub localization: bool,
}

fn default_kernel_samples() -> usize {
    50
}

fn default_kernel_j() -> i32 {
    3
}

fn yes() -> bool {
    true
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection {
            samples: default_kernel_samples(),
            j_abs_max: default_kernel_j(),
            localization: true,
        }
    }
}

/// `verify-coeffs` options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffSection {
    /// Independent streams drawn for the law checks.
    #[serde(default = "default_draws")]
    pub draws: usize,
    /// `M` of the law-check streams (the remainder term compensates).
    #[serde(default = "default_law_terms")]
    pub terms: usize,
    /// Largest `|ζ|` of the characteristic-function comparison.
    #[serde(default = "default_zeta")]
    pub zeta_max: f64,
    /// `δ` of the envelope.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Envelope sample: `|j_l| ≤ j_radius`.
    #[serde(default = "default_env_j")]
    pub j_radius: i32,
    /// Envelope sample: `|k_l| ≤ k_radius` (base sample).
    #[serde(default = "default_env_k")]
    pub k_radius: i64,
}

fn default_draws() -> usize {
    20_000
}

fn default_law_terms() -> usize {
    1000
}

fn default_zeta() -> f64 {
    3.0
}

fn default_delta() -> f64 {
    0.1
}

fn default_env_j() -> i32 {
    4
}

fn default_env_k() -> i64 {
    64
}

impl Default for CoeffSection {
    fn default() -> Self {
        CoeffSection {
            draws: default_draws(),
            terms: default_law_terms(),
            zeta_max: default_zeta(),
            delta: default_delta(),
            j_radius: default_env_j(),
            k_radius: default_env_k(),
        }
    }
}

/// A scan of `verify-regularity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanSpec {
    Directional,
    Rectangular,
    Infinity,
}

/// `verify-regularity` options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySection {
    #[serde(default = "default_scans")]
    pub scans: Vec<ScanSpec>,
    /// Realisations (seeds `seed, seed+1, ...`).
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// Half width `T` of the increment cube.
    #[serde(default = "default_t")]
    pub t: f64,
    /// Dyadic levels `|h| = T 2^{-m}`, `m = 1..=levels`.
    #[serde(default = "default_levels")]
    pub levels: u32,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Multi-index of the directional scan (default all ones).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<u32>>,
    /// Order of the rectangular scan (default `n₀`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Band `η` to scan instead of the full field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<Vec<u8>>,
    /// Truncation of the increment-scan fields.
    #[serde(default = "default_reg_j")]
    pub j_abs_max: i32,
    /// Shells `2^{k-1} < ‖t‖_∞ ≤ 2^k` of the infinity scan.
    #[serde(default = "default_shells")]
    pub shells: u32,
    /// Lattice step of the infinity scan.
    #[serde(default = "default_inf_step")]
    pub infinity_step: f64,
    /// Truncation of the infinity-scan fields.
    #[serde(default = "default_inf_j")]
    pub infinity_j_abs_max: i32,
    /// `M` of the scan streams.
    #[serde(default = "default_reg_terms")]
    pub terms: usize,
    /// When set, every increment scan is repeated with `a_l + offset` as a
    /// control that is expected to diverge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_offset: Option<f64>,
}

fn default_scans() -> Vec<ScanSpec> {
    vec![ScanSpec::Directional, ScanSpec::Rectangular, ScanSpec::Infinity]
}

fn default_seeds() -> usize {
    20
}

fn default_t() -> f64 {
    1.0 / 65536.0
}

fn default_levels() -> u32 {
    8
}

fn default_reg_j() -> i32 {
    30
}

fn default_shells() -> u32 {
    7
}

fn default_inf_step() -> f64 {
    0.5
}

fn default_inf_j() -> i32 {
    4
}

fn default_reg_terms() -> usize {
    200_000
}

impl Default for RegularitySection {
    fn default() -> Self {
        RegularitySection {
            scans: default_scans(),
            seeds: default_seeds(),
            t: default_t(),
            levels: default_levels(),
            delta: default_delta(),
            b: None,
            n: None,
            band: None,
            j_abs_max: default_reg_j(),
            shells: default_shells(),
            infinity_step: default_inf_step(),
            infinity_j_abs_max: default_inf_j(),
            terms: default_reg_terms(),
            control_offset: None,
        }
    }
}

/// `frame-check` options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    #[serde(default = "default_frame_t")]
    pub t: f64,
    #[serde(default = "default_frame_levels")]
    pub levels: u32,
    /// `|k| ≤ c 2^n` at level `n`.
    #[serde(default = "default_frame_c")]
    pub c: f64,
}

fn default_frame_t() -> f64 {
    1.0
}

fn default_frame_levels() -> u32 {
    4
}

fn default_frame_c() -> f64 {
    4.0
}

impl Default for FrameSection {
    fn default() -> Self {
        FrameSection { t: default_frame_t(), levels: default_frame_levels(), c: default_frame_c() }
    }
}

/// A complete run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub d: usize,
    pub seed: u64,
    /// Artifact directory, relative to the configuration file's directory.
    pub output_dir: PathBuf,
    /// Commands executed by `hsf run` (in canonical order).
    #[serde(default)]
    pub run: Vec<Command>,
    pub density: DensitySpec,
    #[serde(default)]
    pub lepage: LePageSection,
    /// Truncation plan (dimension-dependent default when absent).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSection>,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub synth: SynthSection,
    #[serde(default)]
    pub kernels: KernelSection,
    #[serde(default)]
    pub coefficients: CoeffSection,
    #[serde(default)]
    pub regularity: RegularitySection,
    #[serde(default)]
    pub frame: FrameSection,
}

impl RunConfig {
    /// Parse and validate.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Serialise (the canonical form when called on [`Self::canonical`]).
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fill in every default that depends on other fields, and sort the
    /// command selection.
    pub fn canonical(&self) -> Self {
        let mut c = self.clone();
        let d = c.d;
        if c.plan.is_none() {
            let p = hsf_core::synth::TruncationPlan::default_for(d);
            c.plan = Some(PlanSection { j_abs_max: p.j_abs_max, k_margin: p.k_margin });
        }
        if c.alpha < 2.0 && c.lepage.terms.is_none() {
            if let Ok(p) = hsf_core::lepage::LePageParams::new(c.alpha, d) {
                c.lepage.terms = Some(p.terms);
            }
        }
        c.synth.b.get_or_insert_with(|| vec![1; d]);
        c.regularity.b.get_or_insert_with(|| vec![1; d]);
        if let DensitySpec::Builtin { u, v, a_prime, a } = &mut c.density {
            a_prime.get_or_insert(*u);
            a.get_or_insert_with(|| v.iter().map(|vl| vl + *u / d as f64).collect());
        }
        c.run.sort();
        c.run.dedup();
        c
    }

    /// Field-level validation; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, msg: &str| Err(Error::Config(format!("{name}: {msg}")));
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return field("alpha", "must lie in (0, 2]");
        }
        if self.d == 0 || self.d > hsf_core::MAX_DIM {
            return field("d", "must be 1, 2 or 3");
        }
        let d = self.d;
        let len_ok = |v: usize| v == d;
        match &self.density {
            DensitySpec::Builtin { u, v, a_prime, a } => {
                if !(*u > 0.0 && *u < 1.0) {
                    return field("density.u", "must lie in (0, 1)");
                }
                if !len_ok(v.len()) {
                    return field("density.v", "needs one entry per dimension");
                }
                if v.iter().any(|x| !(*x >= 0.0)) {
                    return field("density.v", "entries must be non-negative");
                }
                if a_prime.is_some_and(|x| !(x > 0.0)) {
                    return field("density.a_prime", "must be positive");
                }
                if a.as_ref().is_some_and(|a| !len_ok(a.len())) {
                    return field("density.a", "needs one entry per dimension");
                }
            }
            DensitySpec::Table { a_prime, a, .. } => {
                if !(*a_prime > 0.0) {
                    return field("density.a_prime", "must be positive");
                }
                if !len_ok(a.len()) {
                    return field("density.a", "needs one entry per dimension");
                }
            }
        }
        if !(self.lepage.epsilon_phi > 0.0) {
            return field("lepage.epsilon_phi", "must be positive");
        }
        if self.lepage.terms == Some(0) {
            return field("lepage.terms", "must be positive");
        }
        if let Some(p) = &self.plan {
            if p.j_abs_max < 0 || p.j_abs_max > 40 {
                return field("plan.j_abs_max", "must lie in [0, 40]");
            }
            if p.k_margin < 0 {
                return field("plan.k_margin", "must be non-negative");
            }
        }
        let l = &self.lattice;
        if !len_ok(l.origin.len()) || !len_ok(l.step.len()) || !len_ok(l.counts.len()) {
            return field("lattice", "origin, step and counts need one entry per dimension");
        }
        if l.step.iter().any(|s| !(*s > 0.0)) {
            return field("lattice.step", "entries must be positive");
        }
        if l.counts.contains(&0) {
            return field("lattice.counts", "entries must be positive");
        }
        if self.synth.realizations == 0 {
            return field("synth.realizations", "must be positive");
        }
        if self.synth.b.as_ref().is_some_and(|b| !len_ok(b.len())) {
            return field("synth.b", "needs one entry per dimension");
        }
        if self.coefficients.draws < 2 {
            return field("coefficients.draws", "need at least two draws");
        }
        if self.coefficients.terms == 0 {
            return field("coefficients.terms", "must be positive");
        }
        let r = &self.regularity;
        if r.seeds == 0 {
            return field("regularity.seeds", "must be positive");
        }
        if !(r.t > 0.0) {
            return field("regularity.t", "must be positive");
        }
        if r.levels == 0 || r.levels > 30 {
            return field("regularity.levels", "must lie in [1, 30]");
        }
        if r.b.as_ref().is_some_and(|b| !len_ok(b.len())) {
            return field("regularity.b", "needs one entry per dimension");
        }
        if r.band.as_ref().is_some_and(|e| !len_ok(e.len()) || e.iter().any(|&x| x > 1)) {
            return field("regularity.band", "needs one 0/1 entry per dimension");
        }
        if !(r.infinity_step > 0.0) {
            return field("regularity.infinity_step", "must be positive");
        }
        if r.terms == 0 {
            return field("regularity.terms", "must be positive");
        }
        if !(self.frame.t.is_finite()) || self.frame.levels == 0 {
            return field("frame", "t must be finite and levels positive");
        }
        Ok(())
    }
}
