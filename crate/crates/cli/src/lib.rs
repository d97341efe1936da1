//! Batch front end for `polycycle-core`: reads a TOML job, runs one command and
//! writes CSV/JSON reports into an output directory.

pub mod config;
mod commands;
mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Exit codes: 0 success, 1 failed verification or inconclusive result,
/// 2 input error.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<polycycle_core::Error> for CliError {
    fn from(e: polycycle_core::Error) -> Self {
        match e {
            polycycle_core::Error::NonConvergence { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polycycle", version, about = "Iterated integrals near saddle polycycles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Partial fractions of the Mellin transform.
    Mellin,
    /// Asymptotic expansion to order p with its tail certificate.
    Expand,
    /// Partial sum and tail bound on a grid of levels.
    Eval,
    /// Compare the symbolic result with the quadrature oracle.
    Verify,
    /// Zero-free certificate near t = 0.
    Zeros,
    /// Quasi-unipotence of the induced maps on the graded free Lie algebra.
    Lie,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Job configuration (TOML).
    #[arg(long, global = true, default_value = "polycycle.toml")]
    pub config: PathBuf,
    /// Expansion order p (overrides engine.order).
    #[arg(long, global = true)]
    pub order: Option<u32>,
    /// Comma-separated levels (overrides engine.t).
    #[arg(long, global = true, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Relative tolerance for verify (overrides engine.tol).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output directory (overrides output.dir; default ".").
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Working precision in bits for series evaluation, 24..=106.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
}

/// Runs one command; the returned message is printed to stdout on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let mut cfg = config::load(&cli.options.config)?;
    let o = &cli.options;
    if let Some(order) = o.order {
        cfg.engine.order = order;
    }
    if let Some(t) = &o.t {
        cfg.engine.t = t.clone();
    }
    if let Some(tol) = o.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Input(format!("--tol must be positive, got {tol}")));
        }
        cfg.engine.tol = tol;
    }
    if let Some(bits) = o.precision {
        cfg.engine.precision = polycycle_core::WorkingPrecision::from_bits(bits)?;
    }
    let out_dir = o
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|e| {
        CliError::Input(format!("cannot create output directory {}: {e}", out_dir.display()))
    })?;
    let ctx = commands::Context { cfg, out_dir };
    match cli.command {
        Command::Mellin => commands::mellin(&ctx),
        Command::Expand => commands::expand(&ctx),
        Command::Eval => commands::eval(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Zeros => commands::zeros(&ctx),
        Command::Lie => commands::lie(&ctx),
    }
}
