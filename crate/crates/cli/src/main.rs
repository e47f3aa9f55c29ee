//! `fibernoise` command-line front end.
//!
//! Exit status: 0 success, 2 configuration or input-data error, 3 simulation
//! failure (including failed noise verification and fit non-convergence),
//! 4 I/O error. Errors are printed as `error[<category>]: <message>`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Environment variable capping the worker threads; `--threads` wins.
pub const THREADS_ENV: &str = "FIBERNOISE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fibernoise",
    version,
    about = "Quantum noise in nonlinear optical fibers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Master seed (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (overrides the config; relative to the working directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (overrides the environment and the config).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate an ensemble and write observable tables.
    Run {
        #[command(flatten)]
        common: Overrides,
        /// Trajectory count (overrides the config).
        #[arg(long)]
        trajectories: Option<usize>,
    },
    /// Fit a multi-Lorentzian Raman response to a gain spectrum.
    Fit(commands::FitArgs),
    /// Check every noise generator against its target moments.
    Verify {
        #[command(flatten)]
        common: Overrides,
        /// Draws per generator (overrides the config).
        #[arg(long)]
        draws: Option<usize>,
        /// Multiply all noise amplitudes by this factor (negative control).
        #[arg(long, hide = true, default_value_t = 1.0)]
        corrupt_scale: f64,
    },
    /// Print the soliton-unit scalings for a fiber.
    Units(commands::UnitsArgs),
}

/// Failure with its exit-status category.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Simulation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Simulation(_) => "simulation",
            CliError::Io(_) => "io",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            common,
            trajectories,
        } => commands::run(&common, trajectories),
        Command::Fit(args) => commands::fit(&args),
        Command::Verify {
            common,
            draws,
            corrupt_scale,
        } => commands::verify(&common, draws, corrupt_scale),
        Command::Units(args) => commands::units(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.code())
        }
    }
}
