//! `ist` command-line driver: configuration, the five pipelines and their
//! exit-code contract (0 ok, 2 config, 3 inadmissible, 4 all-singular,
//! 5 tolerance, 6 blow-up).

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ist_core::IstError;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Inadmissible(String),
    AllSingular(String),
    Tolerance(String),
    Blowup(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Inadmissible(_) => 3,
            CliError::AllSingular(_) => 4,
            CliError::Tolerance(_) => 5,
            CliError::Blowup(_) => 6,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m)
            | CliError::Inadmissible(m)
            | CliError::AllSingular(m)
            | CliError::Tolerance(m)
            | CliError::Blowup(m) => m,
        }
    }
}

impl From<IstError> for CliError {
    fn from(e: IstError) -> Self {
        let msg = e.to_string();
        match e {
            IstError::Inadmissible(_) | IstError::DegenerateEigenvalues(_) => CliError::Inadmissible(msg),
            IstError::BlowupDetected { .. } => CliError::Blowup(msg),
            IstError::SingularSolution { .. }
            | IstError::SingularProduct(_)
            | IstError::SingularTransfer { .. }
            | IstError::DivisionNearZero(_) => CliError::AllSingular(msg),
            IstError::Domain(_) | IstError::SingularPoint(_) | IstError::NearBranchPoint(_) | IstError::GridMismatch(_) => {
                CliError::Config(msg)
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ist", version, about = "Inverse scattering for the nonlocal PT-symmetric Ablowitz-Ladik lattice")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; stdout when omitted (for `evolve`, the trajectory CSV).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for randomized spectral sample placement.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the admissible discrete spectrum.
    Eigs(CommonArgs),
    /// Tabulate the reconstructed field as CSV.
    Soliton(CommonArgs),
    /// Direct scattering report for a field window.
    Scatter(CommonArgs),
    /// Residual and invariant checks with pass/fail per check.
    Verify(CommonArgs),
    /// RK4 evolution compared against the analytic solution.
    Evolve(CommonArgs),
}

/// Text a command produced and the exit code it asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub main: String,
    /// Secondary artifact written to `--out` (only `evolve` has one).
    pub side: Option<String>,
    pub code: i32,
    pub diagnostic: Option<String>,
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("IST_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("IST_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ist: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (args, which) = match &cli.command {
        Command::Eigs(a) => (a, "eigs"),
        Command::Soliton(a) => (a, "soliton"),
        Command::Scatter(a) => (a, "scatter"),
        Command::Verify(a) => (a, "verify"),
        Command::Evolve(a) => (a, "evolve"),
    };
    let cfg = config::RunConfig::load(&args.config)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| match which {
        "eigs" => commands::eigs(&cfg),
        "soliton" => commands::soliton(&cfg),
        "scatter" => commands::scatter(&cfg, args.seed),
        "verify" => commands::verify(&cfg, args.seed),
        _ => commands::evolve(&cfg),
    })?;
    match (&args.out, &outcome.side) {
        (Some(path), Some(side)) => {
            write_text(path, side)?;
            print!("{}", outcome.main);
        }
        (Some(path), None) => write_text(path, &outcome.main)?,
        (None, _) => print!("{}", outcome.main),
    }
    if let Some(d) = &outcome.diagnostic {
        eprintln!("ist: {d}");
    }
    Ok(outcome.code)
}
