use std::path::Path;
use std::process::{Command, Output};

use hsf::output::{sha256_hex, Manifest};

const FIELD: &str = r#"
alpha = 1.2
d = 1
seed = 5
output_dir = "OUT"
run = ["synth", "bands", "derivs"]

[density]
kind = "builtin"
u = 0.3
v = [1.0]

[lepage]
terms = 2000

[plan]
j_abs_max = 2
k_margin = 12

[lattice]
origin = [-1.0]
step = [0.03125]
counts = [65]

[synth]
realizations = 2
"#;

fn hsf(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsf")).args(args).arg(config).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.toml"));
    std::fs::write(&path, text.replace("OUT", name)).unwrap();
    path
}

fn manifest(dir: &Path) -> Manifest {
    Manifest::from_toml(&std::fs::read_to_string(dir.join("manifest.toml")).unwrap()).unwrap()
}

/// Every listed artifact exists with the recorded checksum; returns the
/// files as (path, bytes).
fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let m = manifest(dir);
    m.artifact
        .iter()
        .map(|a| {
            let bytes = std::fs::read(dir.join(&a.path)).unwrap();
            assert_eq!(sha256_hex(&bytes), a.sha256, "{}", a.path);
            assert_eq!(bytes.len() as u64, a.bytes);
            (a.path.clone(), bytes)
        })
        .collect()
}

#[test]
fn reruns_and_worker_counts_agree_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    let mut outputs = Vec::new();
    for (name, workers) in runs {
        let cfg = write_config(tmp.path(), name, FIELD);
        let out = hsf(&["--workers", workers, "run"], &cfg);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let dir = tmp.path().join(name);
        let m = manifest(&dir);
        assert!(m.all_ok());
        let names: Vec<&str> = m.command.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["synth", "bands", "derivs"]);
        assert!(m.command.iter().all(|c| c.rng_streams > 0));
        outputs.push((m, artifacts(&dir)));
    }
    let (m0, a0) = &outputs[0];
    assert!(a0.iter().any(|(p, _)| p == "synth/field_001.hsfg"));
    assert!(a0.iter().any(|(p, _)| p == "bands/band_1.hsfg.toml"));
    for (m, a) in &outputs[1..] {
        // The output directory name is part of the configuration text.
        let same: Vec<_> = a.iter().filter(|(p, _)| p != "config.toml").collect();
        let base: Vec<_> = a0.iter().filter(|(p, _)| p != "config.toml").collect();
        assert_eq!(same, base);
        assert_eq!(m.command, m0.command);
    }
}

#[test]
fn empty_selection_writes_only_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "empty", &FIELD.replace(r#"["synth", "bands", "derivs"]"#, "[]"));
    let out = hsf(&["run"], &cfg);
    assert!(out.status.success());
    let dir = tmp.path().join("empty");
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files, ["manifest.toml"]);
    let m = manifest(&dir);
    assert!(m.command.is_empty() && m.artifact.is_empty());
    assert_eq!(m.run.seed, 5);
    assert_eq!(m.run.alpha, 1.2);
}

#[test]
fn partial_failure_keeps_the_manifest() {
    // The missing table breaks every density-based command; the lemma
    // oracles need neither a density nor random numbers.
    let tmp = tempfile::tempdir().unwrap();
    let text = FIELD
        .replace(r#"["synth", "bands", "derivs"]"#, r#"["verify-lemmas", "synth"]"#)
        .replace(
            "kind = \"builtin\"\nu = 0.3\nv = [1.0]",
            "kind = \"table\"\npath = \"missing.txt\"\na_prime = 0.3\na = [1.3]",
        );
    let cfg = write_config(tmp.path(), "partial", &text);
    let out = hsf(&["run"], &cfg);
    assert_eq!(out.status.code(), Some(1));
    let dir = tmp.path().join("partial");
    let m = manifest(&dir);
    assert!(!m.all_ok());
    let synth = &m.command[0];
    assert_eq!((synth.name.as_str(), synth.status.as_str()), ("synth", "failed"));
    assert!(synth.message.as_deref().unwrap().contains("missing.txt"));
    let lemmas = &m.command[1];
    assert_eq!((lemmas.name.as_str(), lemmas.status.as_str()), ("verify-lemmas", "ok"));
    assert_eq!(lemmas.rng_streams, 0);
    let written = artifacts(&dir);
    assert!(written.iter().any(|(p, _)| p == "verify-lemmas/report.toml"));
    assert!(written.iter().all(|(p, _)| !p.starts_with("synth/")));
}

#[test]
fn invalid_configuration_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad", &FIELD.replace("alpha = 1.2", "alpha = 2.5"));
    let out = hsf(&["synth"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    assert!(!tmp.path().join("bad").exists());
    let unknown = write_config(tmp.path(), "typo", &format!("sed = 1\n{FIELD}"));
    let out = hsf(&["synth"], &unknown);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sed"));
}
