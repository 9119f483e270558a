//! `gqmech` — geometric-quantization engine front end.
//!
//! Subcommands: `check-dirac` (exact symbolic verification suites),
//! `evolve` (quantum vs classical evolution, CSV output), and
//! `frame-compare` (frame-covariance experiment). See the repository
//! README for the config file format.

use std::path::PathBuf;
use std::process::ExitCode as ProcessExit;

use clap::{Parser, Subcommand};

use gqmech_cli::config::parse_config;
use gqmech_cli::runs::{run_check_dirac, run_evolve, run_frame_compare, validate_observables};
use gqmech_cli::{CliError, ExitCode};
use gqmech_core::exec::ExecMode;

#[derive(Parser)]
#[command(
    name = "gqmech",
    about = "Geometric quantization of time-dependent Hamiltonian mechanics",
    version
)]
struct Cli {
    /// Model configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for reports and CSV files.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Seed for the randomized suites.
    #[arg(long, global = true, value_name = "UINT", default_value_t = 0)]
    seed: u64,

    /// Number of randomized trials per suite.
    #[arg(long, global = true, value_name = "UINT", default_value_t = 200)]
    trials: u64,

    /// Total degree of the random polynomials.
    #[arg(long, global = true, value_name = "UINT", default_value_t = 3)]
    degree: u32,

    /// Run the numerical kernels on a single thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact symbolic verification suites (Dirac condition on all
    /// quantization maps, evolution identity).
    CheckDirac,
    /// Evolve a Gaussian packet under the quantized Hamiltonian and the
    /// matching classical trajectory; write classical.csv and quantum.csv.
    Evolve,
    /// Compare rest-frame and moving-frame evolutions and check the exact
    /// frame splitting of the Hamiltonian.
    FrameCompare,
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let mode = if cli.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    };
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config PATH is required"))?;
    let text = std::fs::read_to_string(config_path).map_err(|e| {
        CliError::config(format!("cannot read {}: {e}", config_path.display()))
    })?;
    let spec = parse_config(&text)?;
    validate_observables(&spec)?;
    match cli.command {
        Command::CheckDirac => {
            if cli.trials == 0 {
                return Err(CliError::config("--trials must be at least 1"));
            }
            run_check_dirac(&spec, &cli.out, cli.trials, cli.degree, cli.seed, mode)
        }
        Command::Evolve => run_evolve(&spec, &cli.out, mode),
        Command::FrameCompare => run_frame_compare(&spec, &cli.out, mode),
    }
}

fn main() -> ProcessExit {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ProcessExit::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ProcessExit::from(e.code as u8)
        }
    }
}
