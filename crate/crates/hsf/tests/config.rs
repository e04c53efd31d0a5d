use std::path::Path;

use hsf::config::{DensitySpec, ScanSpec};
use hsf::{Command, Error, RunConfig};
use proptest::prelude::*;

const MINIMAL: &str = r#"
alpha = 1.5
d = 2
seed = 9
output_dir = "out"
run = ["verify-lemmas", "synth", "synth"]

[density]
kind = "builtin"
u = 0.4
v = [1.0, 0.5]

[lattice]
origin = [-1.0, -1.0]
step = [0.25, 0.25]
counts = [9, 9]
"#;

fn config_error(text: &str) -> String {
    match RunConfig::from_toml(text) {
        Err(Error::Config(m)) => m,
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn canonical_form_round_trips() {
    let cfg = RunConfig::from_toml(MINIMAL).unwrap();
    let canon = cfg.canonical();
    assert_eq!(canon.run, vec![Command::Synth, Command::VerifyLemmas]);
    assert_eq!(canon.synth.b, Some(vec![1, 1]));
    match &canon.density {
        DensitySpec::Builtin { a_prime, a, .. } => {
            assert_eq!(*a_prime, Some(0.4));
            assert_eq!(a.as_deref(), Some(&[1.2, 0.7][..]));
        }
        other => panic!("{other:?}"),
    }
    assert!(canon.plan.is_some() && canon.lepage.terms.is_some());
    let text = canon.to_toml().unwrap();
    let back = RunConfig::from_toml(&text).unwrap();
    assert_eq!(back, canon);
    assert_eq!(back.canonical(), canon);
    assert_eq!(back.to_toml().unwrap(), text);
}

#[test]
fn shipped_configs_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let canon = RunConfig::load(&path).unwrap().canonical();
            assert_eq!(RunConfig::from_toml(&canon.to_toml().unwrap()).unwrap(), canon);
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

#[test]
fn unknown_keys_are_rejected() {
    let top = format!("colour = \"red\"\n{MINIMAL}");
    assert!(config_error(&top).contains("colour"));
    let nested = MINIMAL.replace("counts = [9, 9]", "counts = [9, 9]\nspacing = 2");
    assert!(config_error(&nested).contains("spacing"));
    let in_density = MINIMAL.replace("u = 0.4", "u = 0.4\nw = 1.0");
    assert!(config_error(&in_density).contains('w'));
    let bad_command = MINIMAL.replace("\"verify-lemmas\"", "\"verify-everything\"");
    assert!(config_error(&bad_command).contains("verify-everything"));
}

#[test]
fn errors_name_the_field() {
    for (from, to, field) in [
        ("alpha = 1.5", "alpha = 2.5", "alpha"),
        ("d = 2", "d = 4", "d"),
        ("u = 0.4", "u = 1.0", "density.u"),
        ("v = [1.0, 0.5]", "v = [1.0]", "density.v"),
        ("step = [0.25, 0.25]", "step = [0.25, 0.0]", "lattice.step"),
        ("counts = [9, 9]", "counts = [9, 0]", "lattice.counts"),
        ("counts = [9, 9]", "counts = [9]", "lattice"),
    ] {
        let m = config_error(&MINIMAL.replace(from, to));
        assert!(m.starts_with(field), "{field}: {m}");
    }
    let r = format!("{MINIMAL}\n[regularity]\nlevels = 0\n");
    assert!(config_error(&r).starts_with("regularity.levels"));
    let p = format!("{MINIMAL}\n[plan]\nj_abs_max = 41\nk_margin = 1\n");
    assert!(config_error(&p).starts_with("plan.j_abs_max"));
    // Missing required keys are named by the parser.
    assert!(config_error(&MINIMAL.replace("seed = 9", "")).contains("seed"));
}

#[test]
fn sections_have_documented_defaults() {
    let cfg = RunConfig::from_toml(MINIMAL).unwrap();
    assert_eq!(cfg.lepage.epsilon_phi, 0.5);
    assert_eq!(cfg.synth.realizations, 1);
    assert_eq!(cfg.kernels.samples, 50);
    assert_eq!(cfg.coefficients.draws, 20_000);
    assert_eq!(
        cfg.regularity.scans,
        vec![ScanSpec::Directional, ScanSpec::Rectangular, ScanSpec::Infinity]
    );
}

proptest! {
    #[test]
    fn builtin_configs_round_trip(alpha in 0.1f64..=2.0, u in 0.01f64..0.99,
                                  v in proptest::collection::vec(0.0f64..3.0, 1..=3),
                                  seed in any::<u64>(), step in 1e-3f64..1.0, n in 1usize..100) {
        let d = v.len();
        let text = format!(
            "alpha = {alpha:?}\nd = {d}\nseed = {seed}\noutput_dir = \"o\"\n\
             [density]\nkind = \"builtin\"\nu = {u:?}\nv = {v:?}\n\
             [lattice]\norigin = {:?}\nstep = {:?}\ncounts = {:?}\n",
            vec![-1.0; d], vec![step; d], vec![n; d],
        );
        let canon = RunConfig::from_toml(&text).unwrap().canonical();
        let back = RunConfig::from_toml(&canon.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, canon);
    }
}
