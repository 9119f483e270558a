//! Batch front end for the quantization engine: config parsing, the three
//! subcommand drivers, and report/CSV formatting.
//!
//! All output files are deterministic: identical config and seed produce
//! byte-identical CSV and report files. Timing is therefore written to
//! stderr only, never into an output file.

pub mod config;
pub mod runs;

use std::fmt;

/// Process exit codes of the `gqmech` binary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    /// All checks passed.
    Ok = 0,
    /// A verification check failed (nonzero defect, tolerance exceeded).
    CheckFailed = 1,
    /// Invalid configuration or usage.
    ConfigError = 2,
    /// Runtime failure: solver divergence, I/O, numeric trouble.
    RuntimeError = 3,
}

/// A failure carrying the exit code it should produce.
#[derive(Debug)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: ExitCode::ConfigError,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        CliError {
            code: ExitCode::RuntimeError,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::runtime(format!("i/o error: {e}"))
    }
}

impl From<gqmech_core::Error> for CliError {
    fn from(e: gqmech_core::Error) -> Self {
        CliError::runtime(format!("engine error: {e}"))
    }
}

/// Formats a float with 17 significant digits, enough to round-trip any
/// IEEE double exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
