//! `equiloc` command-line front end.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use equiloc::Error;

#[derive(Parser, Debug)]
#[command(name = "equiloc", version, about = "Invariant Riemann-Roch numbers from fixed-point data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Invariant and total Riemann-Roch numbers.
    Rr(RunArgs),
    /// The equivariant index as a Laurent polynomial.
    Character(RunArgs),
    /// Residue, exceptional and regular terms of the invariant number.
    MainFormula(RunArgs),
    /// Compare the Witten integral with its large-m expansion.
    WittenCheck(WittenArgs),
    /// Run the full consistency suite on one or all presentations.
    Verify(RunArgs),
    /// Print or write the shipped builtin documents.
    Export(ExportArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Builtin presentation name, or `all` where supported.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub builtin: Option<String>,
    /// Presentation document (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: Source,
    /// Line bundle powers: `5`, `1,2,3` or an inclusive range `0..8`.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Kirillov check tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub kirillov_tol: f64,
    /// Largest accepted Witten decay exponent.
    #[arg(long, default_value_t = -3.0)]
    pub max_exponent: f64,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct WittenArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Leave out the zero-level distribution terms (negative control).
    #[arg(long)]
    pub drop_fixed: bool,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta1: f64,
    #[arg(long, default_value_t = 0.3)]
    pub delta2: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    /// Builtin name or `all`.
    #[arg(long, default_value = "all")]
    pub builtin: String,
    /// Directory to write `<name>.json` files into; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Verification(String),
    Input(String),
    Math(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Math(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAPolynomial(_) | Error::CancellationFailure(_) => Failure::Math(e.to_string()),
            Error::Invalid(diags) => Failure::Input(
                diags
                    .iter()
                    .map(|d| format!("invalid presentation: {}", d))
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
            Error::Syntax { .. }
            | Error::UnknownBuiltin(_)
            | Error::InvalidArgument(_)
            | Error::InvalidRing(_)
            | Error::Expression(_)
            | Error::OracleLimit(_)
            | Error::InsufficientRange(_) => Failure::Input(e.to_string()),
            other => Failure::Math(other.to_string()),
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("EQUILOC_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Rr(a) => commands::rr(a),
        Command::Character(a) => commands::character(a),
        Command::MainFormula(a) => commands::main_formula(a),
        Command::WittenCheck(a) => commands::witten_check(a),
        Command::Verify(a) => verify::run(a),
        Command::Export(a) => commands::export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verification(msg) | Failure::Input(msg) | Failure::Math(msg) => {
                    eprintln!("error: {}", msg)
                }
            }
            ExitCode::from(f.code())
        }
    }
}
