//! `squeezamp`: simulate protocols, sweep the closed forms, run the
//! acceptance suite and compare Fisher information.
//!
//! Exit codes: 0 ok, 1 validation failure, 2 config error, 3 truncation
//! inadequate, 4 engine/oracle mismatch.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Failure;
use crate::config::Format;

#[derive(Debug, Parser)]
#[command(name = "squeezamp", version, about = "Trapped-ion field sensing with simultaneous SDF and parametric squeezing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one protocol through the engine and the Fock oracle and compare.
    Simulate(CommonArgs),
    /// Evaluate the closed forms over a parameter grid.
    Sweep(CommonArgs),
    /// Run every acceptance criterion.
    Validate(CommonArgs),
    /// Closed-form vs oracle quantum Fisher information.
    Qfi(CommonArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// key=value run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table format
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
    /// Fock truncation (0 = automatic)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Trotter steps for the product-formula comparison
    #[arg(long)]
    pub trotter: Option<usize>,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: config::ConfigError| e.0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Failure::Config(String::new()).code() } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Validate(a) => commands::validate(a),
        Command::Qfi(a) => commands::qfi(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("squeezamp: {f}");
            ExitCode::from(f.code())
        }
    }
}
