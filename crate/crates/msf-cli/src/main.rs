//! `msf`: spectral factorization from the command line.

mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msf::corpus::CorpusError;
use msf::diagnostics::DiagnosticsError;
use msf::matpoly::MatPolyError;
use msf::nme::{NmeError, Status};
use msf::surd::SurdError;

/// Exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Stalled,
    Breakdown,
}

impl Outcome {
    fn from_status(s: Status) -> Self {
        match s {
            Status::Converged => Outcome::Success,
            Status::Stalled | Status::MaxIterations => Outcome::Stalled,
            Status::IndefiniteBreakdown { .. } => Outcome::Breakdown,
        }
    }

    fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Stalled => 2,
            Outcome::Breakdown => 3,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}: {1}")]
    Csv(String, csv::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("identities failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    MatPoly(#[from] MatPolyError),
    #[error(transparent)]
    Nme(#[from] NmeError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Surd(SurdError),
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Surd(SurdError::NotRepresentable(_)) => 4,
            CliError::Corpus(CorpusError::Surd(SurdError::NotRepresentable(_))) => 4,
            _ => 1,
        }
    }
}

impl From<SurdError> for CliError {
    fn from(e: SurdError) -> Self {
        CliError::Surd(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Fpi,
    Newton,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Fpi => "fpi",
            Method::Newton => "newton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    F64,
    Dd,
}

impl Precision {
    fn name(self) -> &'static str {
        match self {
            Precision::F64 => "f64",
            Precision::Dd => "dd",
        }
    }
}

/// Problem source: a JSON polynomial file or a built-in example.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// JSON polynomial `{r, m, coeffs: {"k": matrix}, mirror?}`
    #[arg(long)]
    input: Option<PathBuf>,
    /// Built-in example 1-7
    #[arg(long)]
    example: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(name = "msf", version, about = "Matrix spectral factorization by Bauer's method")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the spectral factor and write a run report
    Factor(FactorArgs),
    /// Para-Hermitian, definiteness, determinant and existence checks
    Analyze(AnalyzeArgs),
    /// Exact check of a closed-form solution
    Verify(VerifyArgs),
    /// Convergence-rate measurement against the known solution
    Rates(RatesArgs),
    /// Riccati pencil and closed-loop eigenvalues
    Pencil(PencilArgs),
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value = "newton")]
    method: Method,
    /// Absolute residual tolerance on eps_P (default 1e-13·‖P0‖₂)
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Trace CSV path
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Report JSON path (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
    /// Iterations skipped by the rate fit
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    /// Grid size for the definiteness scan on the unit circle
    #[arg(long, default_value_t = 512)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long)]
    example: usize,
    #[arg(long, value_enum, default_value = "newton")]
    method: Method,
    #[arg(long, default_value_t = 100)]
    iters: usize,
    #[arg(long, default_value_t = 5)]
    burn_in: usize,
    #[arg(long, value_enum, default_value = "f64")]
    precision: Precision,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PencilArgs {
    #[arg(long)]
    example: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Factor(a) => commands::factor(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Rates(a) => commands::rates(&a),
        Command::Pencil(a) => commands::pencil(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("msf: {e}");
            ExitCode::from(e.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn source_is_exclusive_and_required() {
        assert!(Cli::try_parse_from(["msf", "factor"]).is_err());
        assert!(Cli::try_parse_from(["msf", "factor", "--example", "1", "--input", "p.json"]).is_err());
        assert!(Cli::try_parse_from(["msf", "factor", "--example", "1", "--method", "fpi"]).is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome::from_status(Status::Converged).code(), 0);
        assert_eq!(Outcome::from_status(Status::Stalled).code(), 2);
        assert_eq!(Outcome::from_status(Status::IndefiniteBreakdown { iteration: 3 }).code(), 3);
        assert_eq!(CliError::Surd(SurdError::NotRepresentable("x".into())).code(), 4);
        assert_eq!(CliError::Usage("x".into()).code(), 1);
    }
}
