//! `hsf [--workers N] <command> <config.toml>`

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use hsf::{execute, Command, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sub {
    Synth,
    Bands,
    Derivs,
    VerifyKernels,
    VerifyCoeffs,
    VerifyRegularity,
    VerifyLemmas,
    FrameCheck,
    /// Every command listed under `run` in the configuration.
    Run,
}

/// Simulate harmonizable stable random fields and check their properties.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Subcommand.
    #[arg(value_enum)]
    command: Sub,
    /// Run configuration (TOML).
    config: PathBuf,
}

fn selection(sub: Sub, cfg: &RunConfig) -> Vec<Command> {
    match sub {
        Sub::Synth => vec![Command::Synth],
        Sub::Bands => vec![Command::Bands],
        Sub::Derivs => vec![Command::Derivs],
        Sub::VerifyKernels => vec![Command::VerifyKernels],
        Sub::VerifyCoeffs => vec![Command::VerifyCoeffs],
        Sub::VerifyRegularity => vec![Command::VerifyRegularity],
        Sub::VerifyLemmas => vec![Command::VerifyLemmas],
        Sub::FrameCheck => vec![Command::FrameCheck],
        Sub::Run => cfg.run.clone(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("hsf: {e}");
            return ExitCode::from(2);
        }
    };
    let base = cli.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("hsf: cannot start workers: {e}");
            return ExitCode::from(2);
        }
    };
    let cmds = selection(cli.command, &cfg);
    match pool.install(|| execute(&cfg, &base, &cmds)) {
        Ok(outcome) => {
            for c in &outcome.manifest.command {
                match &c.message {
                    Some(m) => eprintln!("{}: {} ({m})", c.name, c.status),
                    None => eprintln!("{}: {}", c.name, c.status),
                }
            }
            eprintln!("manifest: {}", outcome.output_dir.join("manifest.toml").display());
            if outcome.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("hsf: {e}");
            ExitCode::from(2)
        }
    }
}
