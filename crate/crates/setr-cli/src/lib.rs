//! Scenario-driven command-line front end for the SETR toolkit.
//!
//! Subcommands: `compute` (single SETR value), `curve` (conditional
//! no-arbitrage curve as CSV), `simulate` (Monte Carlo path realizations),
//! `verify` (Monte Carlo check of the premium-vs-loss identity).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use commands::CommandKind;

#[derive(Debug, Parser)]
#[command(
    name = "setr",
    version,
    about = "Single-event transition risk: no-arbitrage SETR values, curves, and Monte Carlo verification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the scenario's SETR value (weak_constant, geometric, or residual mode)
    Compute(PathArgs),
    /// Evaluate the conditional no-arbitrage SETR curve over the configured grid
    Curve(PathArgs),
    /// Emit Monte Carlo price-path realizations as CSVs plus a manifest
    Simulate(PathArgs),
    /// Monte Carlo check of the premium-vs-loss identity at the 3-SE level
    Verify(PathArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Scenario file (JSON; a .toml extension selects the TOML front end)
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (defaults to the config's `output`, else the current directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed override
    #[arg(long)]
    pub seed: Option<u64>,
    /// Extra result format for single-value commands
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of Monte Carlo paths (simulate/verify)
    #[arg(long)]
    pub paths: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Runs the parsed CLI and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let (kind, args) = match &cli.command {
        Command::Compute(a) => (CommandKind::Compute, a),
        Command::Curve(a) => (CommandKind::Curve, a),
        Command::Simulate(a) => (CommandKind::Simulate, a),
        Command::Verify(a) => (CommandKind::Verify, a),
    };
    match commands::run_command(kind, args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
