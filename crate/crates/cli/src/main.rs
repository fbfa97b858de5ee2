//! `clickkit` command-line front-end.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clickkit::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] clickkit::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numeric => 4,
            },
            CliError::Output(_) => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "clickkit", version, about = "Click-counting statistics of multiplexed on-off detectors")]
struct Cli {
    /// Worker threads (all cores by default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact click statistics C_k and Q_B of one or more states.
    Theory(commands::theory::TheoryArgs),
    /// Monte Carlo run of the splitter cascade and detector array.
    Simulate(commands::simulate::SimulateArgs),
    /// Full nonclassicality report for a time-tag file.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Q_B of simulated data versus the mean click number.
    Scan(commands::scan::ScanArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    }
    match cli.command {
        Command::Theory(a) => commands::theory::run(a),
        Command::Simulate(a) => commands::simulate::run(a),
        Command::Analyze(a) => commands::analyze::run(a),
        Command::Scan(a) => commands::scan::run(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clickkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
