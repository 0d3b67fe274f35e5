//! `nnct`: NNCT segregation analysis of labeled point data and size/power
//! simulation campaigns.

mod analyze;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nnct::dist::Alternative;
use nnct::Error;

#[derive(Parser)]
#[command(
    name = "nnct",
    version,
    about = "Nearest-neighbor contingency table tests for spatial segregation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the test battery on an `x,y,label` CSV file.
    Analyze(AnalyzeArgs),
    /// Run a size/power campaign described by a TOML file.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AltArg {
    Right,
    Left,
    TwoSided,
}

impl From<AltArg> for Alternative {
    fn from(a: AltArg) -> Self {
        match a {
            AltArg::Right => Alternative::Right,
            AltArg::Left => Alternative::Left,
            AltArg::TwoSided => Alternative::TwoSided,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Input CSV with header `x,y,label`.
    input: PathBuf,
    /// Randomization permutations; 0 disables randomization p-values.
    #[arg(long, default_value_t = 0)]
    nperm: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Test identifiers separated by whitespace or `;` (e.g. `pielou;type3-cell:11`),
    /// or `all`.
    #[arg(long, default_value = "all")]
    tests: String,
    /// Deepest Cuzick-Edwards k in the `all` battery.
    #[arg(long, default_value_t = 2)]
    knn: usize,
    #[arg(long, value_enum, default_value_t = AltArg::Right)]
    alternative: AltArg,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Randomization p-value as count / N over fresh permutations (default).
    #[arg(long, conflicts_with = "add_one")]
    exclude_observed: bool,
    /// Randomization p-value as (count + 1) / (N + 1).
    #[arg(long)]
    add_one: bool,
    /// Label token of the cases (class 1); defaults to the first label seen.
    #[arg(long)]
    case_label: Option<String>,
    /// Compute randomization p-values even above the size limit.
    #[arg(long)]
    force_randomization: bool,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Campaign configuration (TOML).
    config: PathBuf,
    /// Results CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json` when `--out` is given.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Print the parsed configuration and exit without running.
    #[arg(long)]
    dry_run: bool,
    /// Override counts with 100 backgrounds x 1000 replications.
    #[arg(long)]
    full_scale: bool,
}

/// Failure with its process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;
pub const EXIT_CONFIG: u8 = 4;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    /// Maps an error from reading or analysing input data.
    pub fn input(e: Error) -> Self {
        let code = match e {
            Error::Config(_) => EXIT_CONFIG,
            Error::Input { .. }
            | Error::Io(_)
            | Error::InvalidPoints(_)
            | Error::InsufficientPoints { .. }
            | Error::UnknownTest(_) => EXIT_INPUT,
            _ => EXIT_DEGENERATE,
        };
        Failure::new(code, e.to_string())
    }

    /// Maps an error from loading or running a campaign.
    pub fn config(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_INPUT,
            Error::Config(_) | Error::InvalidSpec(_) | Error::UnknownTest(_) => EXIT_CONFIG,
            _ => EXIT_DEGENERATE,
        };
        Failure::new(code, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(args) => analyze::run(&args),
        Command::Simulate(args) => simulate::run(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
