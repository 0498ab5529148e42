//! Command line driver for the mass lumping and deflation experiments.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod error;
mod experiments;
mod plot;
mod problem;

use clap::{Args, Parser, Subcommand};
use config::{Config, ExperimentKind};
use error::{CliError, CliResult};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "iga-lumping", version, about = "Mass lumping and spectral deflation experiments for isogeometric explicit dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generalized spectra of the stiffness or mass pencils, with optional deflation.
    Spectrum(Common),
    /// Relative first-frequency error under mesh refinement with fitted rates.
    Convergence(Common),
    /// Central difference runs for each mass treatment.
    Simulate(Common),
    /// Iteration count of deflated against plain runs over the simulated time.
    DeflateRatio(Common),
    /// Trimmed rotated-square spectra over a sweep of rotation angles.
    TrimmedSweep(Common),
    /// Measured against predicted bandwidths of hierarchically lumped masses.
    BandwidthReport(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(kind: ExperimentKind, args: &Common) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(None, format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = Config::from_toml(&text, kind)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::config(None, "--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::config(None, format!("cannot start the thread pool: {e}")))?;
    }
    let dir = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let mut report = experiments::run(&cfg, &dir)?;
    report.push(format!("output in {}", dir.display()));
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Spectrum(a) => (ExperimentKind::Spectrum, a),
        Command::Convergence(a) => (ExperimentKind::Convergence, a),
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
        Command::DeflateRatio(a) => (ExperimentKind::DeflateRatio, a),
        Command::TrimmedSweep(a) => (ExperimentKind::TrimmedSweep, a),
        Command::BandwidthReport(a) => (ExperimentKind::BandwidthReport, a),
    };
    match execute(kind, args) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
