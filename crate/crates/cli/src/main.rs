//! `lielorentz`: build, verify, integrate and transform symmetric
//! electromagnetic fields from a TOML run configuration.
//!
//! Exit codes: 0 success, 1 verification or run failure, 2 usage or
//! configuration error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::commands::Ctx;
use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Verification(String),
    #[error(transparent)]
    Run(#[from] lielorentz::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lielorentz",
    version,
    about = "Symmetric electromagnetic fields for planar charged-particle motion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Scaled residual tolerance for `check`; overrides `[check] tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Worker threads for grid evaluation (default: number of processors).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the field family on the grid (field.csv).
    BuildEval,
    /// Verify the determining equations, Faraday's law and optionally the
    /// orbit eps-scaling (residuals.csv, summary.txt, orbit.csv).
    Check,
    /// Integrate a trajectory (lab.csv, canonical.csv, frames.csv).
    Integrate,
    /// Tabulate the Faraday-completed free functions (completed.csv).
    CompleteFaraday,
    /// Transform points or a trajectory between frames (canon.csv,
    /// canon_trajectory.csv).
    Canon,
    /// Print the normalized configuration.
    Normalize,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    if let Some(tol) = cli.tol {
        if !(tol > 0.0) {
            return Err(CliError::Config("--tol must be positive".into()));
        }
    }
    let config = RunConfig::load(&config_path)?;
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--workers: {e}")))?;
    }
    let out = config.out_dir(cli.out.as_deref(), &config_path);
    let ctx = Ctx {
        config,
        config_path,
        out,
        seed: cli.seed,
    };
    match cli.command {
        Command::BuildEval => commands::build_eval(&ctx),
        Command::Check => commands::check(&ctx, cli.tol),
        Command::Integrate => commands::integrate(&ctx),
        Command::CompleteFaraday => commands::complete_faraday(&ctx),
        Command::Canon => commands::canon(&ctx),
        Command::Normalize => {
            print!("{}", ctx.config.normalized());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lielorentz: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
