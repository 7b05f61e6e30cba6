//! `qherm` command-line front end.
//!
//! Exit codes: 0 when every report line passes, 1 on a mathematical failure
//! (a failed check or an error from the core), 2 on usage, parse or I/O
//! errors.

// Gates are written `!(x < tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod matrix_file;
pub mod report;

use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "qherm",
    version,
    about = "Hermitization toolkit for quasi-Hermitian matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Triangular,
    Power,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a (Hamiltonian, metric) pair: Hermiticity and positivity of the
    /// metric, the quasi-Hermiticity residual and reality of the spectrum.
    Verify {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        metric: PathBuf,
    },
    /// Build a metric from the left eigenbasis, with unit weights by default.
    #[command(allow_negative_numbers = true)]
    Metric {
        #[arg(long)]
        hamiltonian: PathBuf,
        /// Comma-separated positive weights, one per eigenvalue in ascending order.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        /// Output metric file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Split the Dyson map into metric and Hamiltonian factors.
    #[command(allow_negative_numbers = true)]
    Split {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        /// Dyson map for the triangular split; defaults to the Cholesky root of the metric.
        #[arg(long)]
        dyson: Option<PathBuf>,
        #[arg(long, value_enum)]
        strategy: Strategy,
        /// Interpolation parameter in [0, 1], required for `power`.
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        wh: f64,
        #[arg(long, default_value_t = 1.0)]
        wm: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimize the split cost over the power family.
    #[command(allow_negative_numbers = true)]
    OptimizeSplit {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        wh: f64,
        #[arg(long, default_value_t = 1.0)]
        wm: f64,
        /// CSV of the cost grid; printed to stdout (report to stderr) if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the auxiliary and metric norms of an evolving state.
    #[command(allow_negative_numbers = true)]
    Evolve {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        dt: f64,
        /// CSV trace; printed to stdout (report to stderr) if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the two-parameter 2x2 model and its closed-form report.
    #[command(allow_negative_numbers = true)]
    Example {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("output stream: {0}")]
    Stream(#[from] io::Error),
    #[error(transparent)]
    Math(#[from] qherm_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use qherm_core::Error as E;
        match self {
            CliError::Math(
                E::NotSquare { .. }
                | E::NonFinite { .. }
                | E::DimensionMismatch { .. }
                | E::NonPositiveWeight { .. }
                | E::MuOutOfRange(_)
                | E::NegativeCostWeight { .. }
                | E::InvalidTimeGrid { .. },
            ) => 2,
            CliError::Math(_) => 1,
            _ => 2,
        }
    }
}

/// Runs one command; `Ok(true)` when every report line passes.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool, CliError> {
    let out = commands::dispatch(cli.command)?;
    if let Some(csv) = &out.csv_stdout {
        stdout.write_all(csv.as_bytes())?;
        write!(stderr, "{}", out.report)?;
    } else {
        write!(stdout, "{}", out.report)?;
    }
    Ok(out.report.all_pass())
}
