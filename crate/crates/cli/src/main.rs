mod args;
mod commands;
mod config;
mod output;
mod pricing;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};

use commands::{diagnose, greeks, reproduce, sweep, var};

/// Error caused by the invocation rather than by the computation.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

impl From<fourier_greeks::Error> for Usage {
    fn from(e: fourier_greeks::Error) -> Self {
        Usage(e.to_string())
    }
}

/// Fourier prices and Greeks of calls and digital puts under the ME and VG models.
#[derive(Debug, Parser)]
#[command(name = "fgreeks", version)]
struct Cli {
    /// File of `key = value` lines supplying defaults for the subcommand's options.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for relative output paths.
    #[arg(long, global = true, env = "FGREEKS_OUTPUT_DIR", default_value = ".")]
    output_dir: PathBuf,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Price, Delta and Gamma at one spot for several methods.
    Greeks(greeks::GreeksArgs),
    /// Price and Greeks over a grid of spots, written as CSV.
    Sweep(sweep::SweepArgs),
    /// One-day Value-at-Risk by full revaluation or Delta-Gamma.
    Var(var::VarArgs),
    /// Tail decay of the characteristic function and the resulting engine conditions.
    Diagnose(diagnose::DiagnoseArgs),
    /// Recompute the reference tables and figure data.
    Reproduce(reproduce::ReproduceArgs),
}

fn run(argv: Vec<OsString>) -> Result<()> {
    let argv = match config::config_path(&argv) {
        Some(path) => {
            let entries = config::load(path.as_ref()).map_err(|e| Usage(format!("{e:#}")))?;
            config::splice(&Cli::command(), argv, &entries).map_err(|e| Usage(e.to_string()))?
        }
        None => argv,
    };
    let matches = Cli::command().get_matches_from(argv.clone());
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let out_dir = cli.output_dir.as_path();
    match &cli.command {
        Cmd::Greeks(a) => greeks::run(a),
        Cmd::Sweep(a) => sweep::run(a, out_dir, &argv, &matches),
        Cmd::Var(a) => var::run(a, out_dir, &argv, &matches),
        Cmd::Diagnose(a) => diagnose::run(a),
        Cmd::Reproduce(a) => reproduce::run(a, out_dir, &argv, &matches),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<Usage>()) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
