//! `qsd` — reproduce, optimize, verify, and simulate minimum-error
//! discrimination of the catalog ensembles or user-supplied JSON inputs.
//!
//! Exit codes: 0 success, 1 verification/acceptance failure or
//! non-convergence, 2 malformed input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod reproduce;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Parser)]
#[command(name = "qsd", version, about = "Local discrimination of product-state ensembles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute the headline numbers and check them against their expected
    /// values.
    Reproduce {
        /// Override every value-comparison tolerance (forces failures when
        /// tighter than solver accuracy).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputFormat,
    },
    /// Find a minimum-error POVM for a named or JSON ensemble and certify it.
    Optimize {
        /// Catalog problem name or path to an ensemble JSON file.
        #[arg(long)]
        ensemble: String,
        /// Convergence tolerance on the Helstrom residuals.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iter: usize,
        /// Start from a random POVM with this seed instead of the maximally
        /// mixed one.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputFormat,
        /// Directory receiving povm.json and helstrom_report.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Check the Helstrom conditions for an ensemble/POVM pair.
    Verify {
        /// Catalog problem name or path to an ensemble JSON file.
        #[arg(long)]
        ensemble: String,
        /// Path to a POVM JSON file.
        #[arg(long)]
        povm: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputFormat,
    },
    /// Evaluate a protocol exactly and by seeded Monte-Carlo sampling.
    Simulate {
        /// Built-in protocol name or path to a protocol JSON file.
        #[arg(long)]
        protocol: String,
        /// Ensemble to play against (defaults to the built-in protocol's own).
        #[arg(long)]
        ensemble: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "table")]
        output: OutputFormat,
    },
    /// List the named ensembles, problems, and built-in protocols.
    Catalog {
        #[arg(long, value_enum, default_value = "table")]
        output: OutputFormat,
    },
}

/// Failure modes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or incompatible input (exit 2).
    Input(String),
    /// A check failed or a solver did not converge (exit 1).
    Failure(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reproduce { tol, output } => commands::reproduce(tol, output),
        Command::Optimize {
            ensemble,
            tol,
            max_iter,
            seed,
            output,
            out_dir,
        } => commands::optimize(&ensemble, tol, max_iter, seed, output, &out_dir),
        Command::Verify { ensemble, povm, tol, output } => {
            commands::verify(&ensemble, &povm, tol, output)
        }
        Command::Simulate {
            protocol,
            ensemble,
            shots,
            seed,
            output,
        } => commands::simulate(&protocol, ensemble.as_deref(), shots, seed, output),
        Command::Catalog { output } => commands::catalog(output),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
