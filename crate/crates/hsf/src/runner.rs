//! Subcommand execution and artifact layout.
//!
//! ```text
//! <output_dir>/config.toml                  canonical configuration
//! <output_dir>/manifest.toml                versions, seeds, statuses, checksums
//! <output_dir>/<command>/report.toml        structured-text report
//! <output_dir>/<command>/*.hsfg(.toml)      grids and sidecars
//! <output_dir>/<command>/*.dat              plot data
//! ```

use std::path::{Path, PathBuf};

use hsf_core::density::{
    check_admissibility, AdmissibilityOptions, BuiltinDensity, DensityExponents, SpectralDensity,
};
use hsf_core::kernel::{verify_localization, LocalizationCase, LocalizationOptions, QuadratureSpec};
use hsf_core::lattice::Lattice;
use hsf_core::lemmas;
use hsf_core::lepage::{envelope_check, Remainder};
use hsf_core::synth::{
    frame_reconstruction_error, FieldRealization, FrequencyBand, KernelBank, Synthesizer,
    TruncationPlan,
};
use toml::{Table, Value};

use crate::checks::{self, Sources};
use crate::config::{Command, DensitySpec, RemainderSpec, RunConfig};
use crate::error::{Error, Result};
use crate::grid;
use crate::output::value::{b, f, fs, i, is, s, table};
use crate::output::{sha256_hex, ArtifactWriter, CommandStatus, Manifest, RunInfo};
use crate::table::RadialTable;

/// Result of [`execute`].
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub manifest: Manifest,
    /// Output directory.
    pub output_dir: PathBuf,
}

impl Outcome {
    /// Every command succeeded.
    pub fn success(&self) -> bool {
        self.manifest.all_ok()
    }
}

/// Build the configured density.  Relative table paths resolve against
/// `base_dir`.
pub fn build_density(cfg: &RunConfig, base_dir: &Path) -> Result<Box<dyn SpectralDensity>> {
    let cfg = cfg.canonical();
    match &cfg.density {
        DensitySpec::Builtin { u, v, a_prime, a } => {
            let mut dens = BuiltinDensity::new(cfg.alpha, *u, v.clone())?;
            if let (Some(ap), Some(a)) = (a_prime, a) {
                dens = dens.with_exponents(DensityExponents { a_prime: *ap, a: a.clone() })?;
            }
            Ok(Box::new(dens))
        }
        DensitySpec::Table { path, a_prime, a } => {
            let table = RadialTable::load(&base_dir.join(path))?;
            Ok(Box::new(table.into_density(*a_prime, a.clone())?))
        }
    }
}

fn remainder(r: RemainderSpec) -> Remainder {
    match r {
        RemainderSpec::Truncate => Remainder::Truncate,
        RemainderSpec::Gaussian => Remainder::Gaussian,
    }
}

struct Runner {
    cfg: RunConfig,
    base_dir: PathBuf,
    out: ArtifactWriter,
    streams: u64,
}

fn band_name(eta: &[u8]) -> String {
    eta.iter().map(|e| char::from(b'0' + e)).collect()
}

fn level_table(r: &FieldRealization) -> Table {
    table(vec![
        ("level_tail", f(r.meta.tail.level_tail)),
        ("table_tail", f(r.meta.tail.table_tail)),
        ("sup_abs", f(r.values.iter().fold(0.0f64, |m, v| m.max(v.abs())))),
    ])
}

impl Runner {
    fn density(&self) -> Result<Box<dyn SpectralDensity>> {
        build_density(&self.cfg, &self.base_dir)
    }

    fn plan(&self) -> TruncationPlan {
        let p = self.cfg.plan.as_ref().expect("canonical config has a plan");
        TruncationPlan { j_abs_max: p.j_abs_max, k_margin: p.k_margin }
    }

    fn lattice(&self) -> Result<Lattice> {
        let l = &self.cfg.lattice;
        Ok(Lattice::new(l.origin.clone(), l.step.clone(), l.counts.clone())?)
    }

    fn sources(&mut self, terms: usize) -> Result<Sources> {
        let c = &self.cfg;
        Sources::new(c.alpha, c.d, terms, c.lepage.epsilon_phi, remainder(c.lepage.remainder))
    }

    fn main_terms(&self) -> usize {
        self.cfg.lepage.terms.unwrap_or(1)
    }

    fn write_grid(&mut self, rel: &str, r: &FieldRealization, seed: u64) -> Result<()> {
        let (bytes, side) = grid::encode_realization(r, seed)?;
        self.out.write(rel, &bytes)?;
        self.out.write(&format!("{rel}.toml"), side.as_bytes())?;
        if r.lattice.dim() == 1 {
            let rows: Vec<Vec<f64>> = (0..r.lattice.len())
                .map(|k| {
                    let mut x = [0.0];
                    r.lattice.point(k, &mut x);
                    vec![x[0], r.values[k]]
                })
                .collect();
            let dat = rel.trim_end_matches(".hsfg").to_string() + ".dat";
            self.out.write_dat(&dat, "t value", &rows)?;
        }
        Ok(())
    }

    fn run(&mut self, cmd: Command) -> Result<()> {
        match cmd {
            Command::Synth => self.synth(),
            Command::Bands => self.bands(),
            Command::Derivs => self.derivs(),
            Command::VerifyKernels => self.verify_kernels(),
            Command::VerifyCoeffs => self.verify_coeffs(),
            Command::VerifyRegularity => self.verify_regularity(),
            Command::VerifyLemmas => self.verify_lemmas(),
            Command::FrameCheck => self.frame_check(),
        }
    }

    fn synth(&mut self) -> Result<()> {
        let dens = self.density()?;
        let plan = self.plan();
        let lat = self.lattice()?;
        let d = self.cfg.d;
        let bank = KernelBank::for_plan(dens.as_ref(), self.cfg.alpha, &vec![0; d], &plan)?;
        let mut sources = self.sources(self.main_terms())?;
        let mut rows = Vec::new();
        for k in 0..self.cfg.synth.realizations as u64 {
            let seed = self.cfg.seed.wrapping_add(k);
            let src = sources.source(seed);
            let r = Synthesizer::new(&bank, src.as_ref(), plan.clone())?.synthesize_full(&lat)?;
            self.write_grid(&format!("synth/field_{k:03}.hsfg"), &r, seed)?;
            let mut t = level_table(&r);
            t.insert("seed".into(), i(seed as i64));
            rows.push(Value::Table(t));
        }
        self.streams += sources.created();
        let report = table(vec![
            ("alpha", f(self.cfg.alpha)),
            ("j_abs_max", i(plan.j_abs_max as i64)),
            ("k_margin", i(plan.k_margin)),
            ("realization", Value::Array(rows)),
        ]);
        self.out.write_report("synth/report.toml", &report)
    }

    fn bands(&mut self) -> Result<()> {
        let dens = self.density()?;
        let plan = self.plan();
        let lat = self.lattice()?;
        let d = self.cfg.d;
        let seed = self.cfg.seed;
        let bank = KernelBank::for_plan(dens.as_ref(), self.cfg.alpha, &vec![0; d], &plan)?;
        let mut sources = self.sources(self.main_terms())?;
        let src = sources.source(seed);
        self.streams += sources.created();
        let syn = Synthesizer::new(&bank, src.as_ref(), plan.clone())?;
        let full = syn.synthesize_full(&lat)?;
        let mut sum = vec![0.0; lat.len()];
        let mut rows = Vec::new();
        for band in FrequencyBand::all(d) {
            let r = syn.synthesize_band(&band, &lat)?;
            for (acc, v) in sum.iter_mut().zip(&r.values) {
                *acc += v;
            }
            let name = band_name(band.eta());
            self.write_grid(&format!("bands/band_{name}.hsfg"), &r, seed)?;
            let mut t = level_table(&r);
            t.insert("eta".into(), is(band.eta()));
            rows.push(Value::Table(t));
        }
        self.write_grid("bands/full.hsfg", &full, seed)?;
        let scale = full.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let diff = full.values.iter().zip(&sum).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let rel = if scale > 0.0 { diff / scale } else { diff };
        let ok = rel <= 1e-12;
        let report = table(vec![
            ("seed", i(seed as i64)),
            ("sum_identity_relative_error", f(rel)),
            ("sum_identity_ok", b(ok)),
            ("band", Value::Array(rows)),
        ]);
        self.out.write_report("bands/report.toml", &report)?;
        if !ok {
            return Err(Error::Check(format!("band sum differs from the full field by {rel:e}")));
        }
        Ok(())
    }

    fn derivs(&mut self) -> Result<()> {
        let dens = self.density()?;
        let plan = self.plan();
        let lat = self.lattice()?;
        let d = self.cfg.d;
        let seed = self.cfg.seed;
        let order = self.cfg.synth.b.clone().unwrap_or_else(|| vec![1; d]);
        let bank = KernelBank::for_plan(dens.as_ref(), self.cfg.alpha, &order, &plan)?;
        let mut sources = self.sources(self.main_terms())?;
        let src = sources.source(seed);
        self.streams += sources.created();
        let syn = Synthesizer::new(&bank, src.as_ref(), plan.clone())?;
        let mut targets: Vec<Option<FrequencyBand>> = vec![None];
        targets.extend(FrequencyBand::all(d).into_iter().map(Some));
        let mut rows = Vec::new();
        for target in &targets {
            let name = match target {
                Some(bd) => format!("band_{}", band_name(bd.eta())),
                None => "full".to_string(),
            };
            match syn.derivative_field(target.as_ref(), &lat) {
                Ok(r) => {
                    self.write_grid(&format!("derivs/{name}.hsfg"), &r, seed)?;
                    let mut t = level_table(&r);
                    t.insert("name".into(), s(name));
                    t.insert("status".into(), s("ok"));
                    rows.push(Value::Table(t));
                }
                Err(hsf_core::Error::Precondition(msg)) => {
                    rows.push(Value::Table(table(vec![
                        ("name", s(name)),
                        ("status", s("refused")),
                        ("reason", s(msg)),
                    ])));
                }
                Err(e) => return Err(e.into()),
            }
        }
        let report = table(vec![
            ("seed", i(seed as i64)),
            ("b", is(&order)),
            ("field", Value::Array(rows)),
        ]);
        self.out.write_report("derivs/report.toml", &report)
    }

    fn verify_kernels(&mut self) -> Result<()> {
        let dens = self.density()?;
        let alpha = self.cfg.alpha;
        let ks = self.cfg.kernels.clone();
        let mut failures = Vec::new();
        let samples = checks::kernel_identity(dens.as_ref(), ks.samples, ks.j_abs_max, self.cfg.seed)?;
        self.streams += 1;
        let max_rel = samples.iter().fold(0.0f64, |m, x| m.max(x.relative));
        if max_rel > 1e-5 {
            failures.push(format!("kernel identity discrepancy {max_rel:e}"));
        }
        let rows: Vec<Value> = samples
            .iter()
            .map(|x| {
                Value::Table(table(vec![
                    ("j", is(&x.j)),
                    ("k", is(&x.k)),
                    ("t", fs(&x.t)),
                    ("direct", f(x.direct)),
                    ("via_kernel", f(x.via_kernel)),
                    ("relative", f(x.relative)),
                ]))
            })
            .collect();
        let mut report = table(vec![
            ("identity_max_relative", f(max_rel)),
            ("identity", Value::Array(rows)),
        ]);
        if ks.localization && self.cfg.d == 1 {
            let quad = QuadratureSpec::default_for(1);
            let mut loc = Vec::new();
            for (case, name) in [
                (LocalizationCase::LowFrequency, "low"),
                (LocalizationCase::HighFrequency, "high"),
            ] {
                let opts = LocalizationOptions::default_for(case);
                let r = verify_localization(dens.as_ref(), alpha, case, &[0], &opts, &quad)?;
                if !(r.spatial_ok && r.exponent_ok) {
                    failures.push(format!("localization ({name} frequency) outside tolerance"));
                }
                let env: Vec<Vec<f64>> = r.envelope.iter().map(|&(x, y)| vec![x, y]).collect();
                self.out.write_dat(&format!("verify-kernels/envelope_{name}.dat"), "x envelope", &env)?;
                loc.push(Value::Table(table(vec![
                    ("case", s(name)),
                    ("p_star", i(r.p_star as i64)),
                    ("spatial_slope", f(r.spatial_slope)),
                    ("spatial_ok", b(r.spatial_ok)),
                    ("fitted_exponent", f(r.fitted_exponent)),
                    ("predicted_exponent", f(r.predicted_exponent)),
                    ("exponent_ok", b(r.exponent_ok)),
                ])));
            }
            report.insert("localization".into(), Value::Array(loc));
        }
        let adm = check_admissibility(dens.as_ref(), alpha, &AdmissibilityOptions::default())?;
        if !(adm.integrable && adm.near.stable && adm.far.stable) {
            failures.push("density admissibility not supported by the samples".into());
        }
        report.insert(
            "admissibility".into(),
            Value::Table(table(vec![
                ("integral", f(adm.integral)),
                ("integrable", b(adm.integrable)),
                ("near_constant", f(adm.near.constant)),
                ("near_stable", b(adm.near.stable)),
                ("far_constant", f(adm.far.constant)),
                ("far_stable", b(adm.far.stable)),
                ("p_star", i(adm.p_star as i64)),
            ])),
        );
        report.insert("ok".into(), b(failures.is_empty()));
        self.out.write_report("verify-kernels/report.toml", &report)?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::Check(failures.join("; ")))
        }
    }

    fn verify_coeffs(&mut self) -> Result<()> {
        let c = self.cfg.coefficients.clone();
        let seed = self.cfg.seed;
        let mut failures = Vec::new();
        let law_sources = self.sources(c.terms)?;
        let law = checks::coefficient_law(&law_sources, seed, c.draws, c.draws, c.zeta_max)?;
        self.streams += (law.sizes.0 + law.sizes.1) as u64;
        if law.ecf_error > 0.02 {
            failures.push(format!("characteristic function error {:e}", law.ecf_error));
        }
        if law.ks.distance > 0.02 {
            failures.push(format!("KS distance {:e}", law.ks.distance));
        }
        let curve: Vec<Vec<f64>> = law.ecf_curve.iter().map(|r| r.to_vec()).collect();
        self.out.write_dat("verify-coeffs/ecf.dat", "zeta re im target", &curve)?;
        let mut report = table(vec![
            ("sigma", f(law.sigma)),
            ("draws", i(c.draws as i64)),
            ("law_terms", i(c.terms as i64)),
            ("ecf_sup_error", f(law.ecf_error)),
            ("ks_distance", f(law.ks.distance)),
            ("ks_p_value", f(law.ks.p_value)),
            ("sample_variance", f(law.variance)),
        ]);
        if self.cfg.alpha == 2.0 {
            let target = 2.0 * (2.0 * std::f64::consts::PI).powi(self.cfg.d as i32);
            let rel = (law.variance / target - 1.0).abs();
            report.insert("variance_target".into(), f(target));
            report.insert("variance_relative_error".into(), f(rel));
            if rel > 0.03 {
                failures.push(format!("variance off by {rel:e}"));
            }
        }
        let mut sources = self.sources(self.main_terms())?;
        let src = sources.source(seed);
        let env = envelope_check(src.as_ref(), c.delta, c.j_radius, c.k_radius)?;
        self.streams += sources.created();
        if !env.stable {
            failures.push("envelope constant grows with the sample".into());
        }
        report.insert(
            "envelope".into(),
            Value::Table(table(vec![
                ("delta", f(c.delta)),
                ("sup_base", f(env.sup_base)),
                ("sup_enlarged", f(env.sup_enlarged)),
                ("samples_base", i(env.samples.0 as i64)),
                ("samples_enlarged", i(env.samples.1 as i64)),
                ("stable", b(env.stable)),
            ])),
        );
        report.insert("ok".into(), b(failures.is_empty()));
        self.out.write_report("verify-coeffs/report.toml", &report)?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::Check(failures.join("; ")))
        }
    }

    fn verify_regularity(&mut self) -> Result<()> {
        let dens = self.density()?;
        let section = self.cfg.regularity.clone();
        let mut sources = self.sources(section.terms)?;
        let k_margin = self.plan().k_margin;
        let outcomes = checks::regularity_scans(
            dens.as_ref(),
            self.cfg.alpha,
            self.cfg.seed,
            k_margin,
            &section,
            &mut sources,
        )?;
        self.streams += sources.created();
        let mut scans = Vec::new();
        let mut failures = Vec::new();
        for o in &outcomes {
            let r = &o.report;
            if !o.as_expected() {
                failures.push(format!(
                    "{}: {} (expected {})",
                    o.label,
                    r.verdict.name(),
                    o.expected.name()
                ));
            }
            let rows: Vec<Vec<f64>> =
                r.rows.iter().map(|x| vec![x.scale, x.median, x.mean, x.max]).collect();
            self.out.write_dat(
                &format!("verify-regularity/{}.dat", o.label),
                "scale median mean max",
                &rows,
            )?;
            let params: Table = r.params.iter().map(|(k, v)| (k.clone(), s(v.clone()))).collect();
            let table_rows: Vec<Value> = r
                .rows
                .iter()
                .map(|x| {
                    Value::Table(table(vec![
                        ("level", i(x.level as i64)),
                        ("scale", f(x.scale)),
                        ("median", f(x.median)),
                        ("mean", f(x.mean)),
                        ("max", f(x.max)),
                        ("void", b(x.void)),
                    ]))
                })
                .collect();
            scans.push(Value::Table(table(vec![
                ("label", s(o.label.clone())),
                ("kind", s(r.kind.name())),
                ("verdict", s(r.verdict.name())),
                ("expected", s(o.expected.name())),
                ("params", Value::Table(params)),
                ("warnings", Value::Array(r.warnings.iter().cloned().map(s).collect())),
                ("row", Value::Array(table_rows)),
            ])));
        }
        let report = table(vec![
            ("seeds", i(section.seeds as i64)),
            ("ok", b(failures.is_empty())),
            ("scan", Value::Array(scans)),
        ]);
        self.out.write_report("verify-regularity/report.toml", &report)?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::Check(failures.join("; ")))
        }
    }

    fn verify_lemmas(&mut self) -> Result<()> {
        let reports = lemmas::run_all()?;
        let ok = reports.iter().all(|r| r.passed());
        let rows: Vec<Value> = reports
            .iter()
            .map(|r| {
                Value::Table(table(vec![
                    ("name", s(r.name.clone())),
                    ("checked", i(r.checked as i64)),
                    ("violations", i(r.violations.len() as i64)),
                    ("constant", f(r.constant)),
                    ("refined_constant", f(r.refined_constant)),
                    ("stable", b(r.stable)),
                    ("passed", b(r.passed())),
                ]))
            })
            .collect();
        let report = table(vec![("ok", b(ok)), ("oracle", Value::Array(rows))]);
        self.out.write_report("verify-lemmas/report.toml", &report)?;
        if ok {
            Ok(())
        } else {
            let bad: Vec<String> =
                reports.iter().filter(|r| !r.passed()).map(|r| r.name.clone()).collect();
            Err(Error::Check(format!("lemma oracles failed: {}", bad.join(", "))))
        }
    }

    fn frame_check(&mut self) -> Result<()> {
        let dens = self.density()?;
        let fr = self.cfg.frame.clone();
        let errs = frame_reconstruction_error(dens.as_ref(), self.cfg.alpha, fr.t, fr.levels, fr.c)?;
        let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
        let ratio = errs.last().unwrap() / errs[0];
        let ok = decreasing && ratio <= 0.2;
        let rows: Vec<Vec<f64>> =
            errs.iter().enumerate().map(|(n, e)| vec![(n + 1) as f64, *e]).collect();
        self.out.write_dat("frame-check/error.dat", "n error", &rows)?;
        let report = table(vec![
            ("t", f(fr.t)),
            ("c", f(fr.c)),
            ("metric", s(hsf_core::synth::delta_alpha_metric(self.cfg.alpha))),
            ("errors", fs(&errs)),
            ("strictly_decreasing", b(decreasing)),
            ("final_over_initial", f(ratio)),
            ("ok", b(ok)),
        ]);
        self.out.write_report("frame-check/report.toml", &report)?;
        if ok {
            Ok(())
        } else {
            Err(Error::Check(format!(
                "frame error not reduced enough (decreasing = {decreasing}, ratio = {ratio:.3})"
            )))
        }
    }
}

/// Run `commands` (deduplicated, canonical order) for `cfg`, resolving
/// relative paths against `base_dir`.  Failing commands are recorded in the
/// manifest; the remaining commands still run.
pub fn execute(cfg: &RunConfig, base_dir: &Path, commands: &[Command]) -> Result<Outcome> {
    cfg.validate()?;
    let cfg = cfg.canonical();
    let output_dir = base_dir.join(&cfg.output_dir);
    let mut out = ArtifactWriter::new(&output_dir)?;
    let text = cfg.to_toml()?;
    let mut cmds = commands.to_vec();
    cmds.sort();
    cmds.dedup();
    // An empty selection leaves the manifest as the only file.
    if !cmds.is_empty() {
        out.write("config.toml", text.as_bytes())?;
    }
    let mut runner = Runner { cfg: cfg.clone(), base_dir: base_dir.to_path_buf(), out, streams: 0 };
    let mut statuses = Vec::new();
    for cmd in cmds {
        runner.streams = 0;
        let res = runner.run(cmd);
        statuses.push(CommandStatus {
            name: cmd.name().to_string(),
            status: if res.is_ok() { "ok" } else { "failed" }.to_string(),
            rng_streams: runner.streams,
            message: res.err().map(|e| e.to_string()),
        });
    }
    let info = RunInfo {
        hsf_version: env!("CARGO_PKG_VERSION").to_string(),
        core_version: hsf_core::VERSION.to_string(),
        seed: cfg.seed,
        alpha: cfg.alpha,
        d: cfg.d,
        config_sha256: sha256_hex(text.as_bytes()),
    };
    let manifest = runner.out.finish(info, statuses)?;
    Ok(Outcome { manifest, output_dir })
}
