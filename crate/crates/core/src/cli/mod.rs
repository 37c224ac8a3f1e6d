//! The `pattern-waits` command-line front end.
//!
//! Exit codes: 0 on success, 1 when the instance or computation fails, 2 on
//! a usage error.

pub mod commands;
pub mod instance;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use crate::analysis::ScanSpec;
use crate::error::Error;
use crate::model::Pattern;
use crate::oracle::{SimulationConfig, DEFAULT_STEP_CAP};
use crate::rational::parse_rational;
use crate::scalar::Scalar;
use instance::Instance;
use report::Report;

pub const STEP_CAP_VAR: &str = "PATTERN_WAITS_STEP_CAP";

#[derive(Debug, Parser)]
#[command(name = "pattern-waits", version, about = "Waiting times for the first of several patterns in a Markov chain")]
pub struct Cli {
    /// Print a JSON report instead of tables.
    #[arg(long, global = true)]
    pub json: bool,
    /// Solve in f64 instead of exact rationals.
    #[arg(long, global = true)]
    pub float: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FileArg {
    /// Instance file (JSON).
    pub file: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stopping probabilities, sojourn times and E(tau); generating functions at extra points.
    Analyze {
        #[command(flatten)]
        input: FileArg,
        /// Extra evaluation point z >= 1, e.g. 3/2. Repeatable.
        #[arg(long = "z", value_parser = rational_arg)]
        z: Vec<BigRational>,
    },
    /// P(tau = tau_K = n) for n up to a horizon.
    Distribution {
        #[command(flatten)]
        input: FileArg,
        #[arg(long)]
        n_max: usize,
    },
    /// Monte Carlo estimates next to the exact values.
    Simulate {
        #[command(flatten)]
        input: FileArg,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; the report does not depend on this.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Ranks every same-length response to an opponent's pattern.
    Penney {
        #[command(flatten)]
        input: FileArg,
        /// A pattern name from the file, or a symbol sequence.
        #[arg(long)]
        opponent: String,
        /// Response length; defaults to the opponent's length.
        #[arg(long)]
        length: Option<usize>,
    },
    /// P(at least k successes in some window of length w by time T) on a binary chain.
    Scan {
        #[command(flatten)]
        input: FileArg,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        threshold: usize,
        #[arg(long)]
        horizon: usize,
    },
}

fn rational_arg(text: &str) -> Result<BigRational, String> {
    parse_rational(text)
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "usage error: {msg}"),
            Failure::Domain(e) => write!(f, "error: {e}"),
        }
    }
}

fn resolve_opponent(inst: &Instance, opponent: &str) -> Result<Pattern, Failure> {
    if let Some(p) = inst.patterns.as_ref().and_then(|c| c.get(opponent)) {
        return Ok(p.clone());
    }
    Pattern::from_labels(inst.chain.alphabet(), opponent).map_err(|_| {
        Failure::Usage(format!(
            "opponent {opponent:?} is neither a pattern in the file nor a sequence of its states"
        ))
    })
}

fn step_cap() -> Result<u64, Failure> {
    match std::env::var(STEP_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| Failure::Usage(format!("{STEP_CAP_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_STEP_CAP),
    }
}

fn dispatch<S: Scalar>(command: &Command, float: bool) -> Result<Report, Failure> {
    let load = |input: &FileArg| instance::load(&input.file, float);
    Ok(match command {
        Command::Analyze { input, z } => commands::analyze::<S>(&load(input)?, z)?,
        Command::Distribution { input, n_max } => commands::distribution::<S>(&load(input)?, *n_max)?,
        Command::Simulate {
            input,
            trials,
            seed,
            workers,
        } => {
            let mut config = SimulationConfig::new(*trials, *seed);
            config.step_cap = step_cap()?;
            config.workers = *workers;
            commands::simulation::<S>(&load(input)?, config)?
        }
        Command::Penney {
            input,
            opponent,
            length,
        } => {
            let inst = load(input)?;
            let opp = resolve_opponent(&inst, opponent)?;
            let length = length.unwrap_or(opp.len());
            commands::penney::<S>(&inst, &opp, length)?
        }
        Command::Scan {
            input,
            window,
            threshold,
            horizon,
        } => {
            let spec = ScanSpec {
                window: *window,
                threshold: *threshold,
                horizon: *horizon,
            };
            commands::scan::<S>(&load(input)?, spec)?
        }
    })
}

/// Runs a parsed command line and returns the text to print.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    let report = if cli.float {
        dispatch::<f64>(&cli.command, true)?
    } else {
        dispatch::<BigRational>(&cli.command, false)?
    };
    Ok(if cli.json {
        let mut s = serde_json::to_string_pretty(&report.json).expect("report serialises");
        s.push('\n');
        s
    } else {
        report.text
    })
}

/// Entry point: parses `args` (program name first), prints, returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(f) => {
            eprintln!("{f}");
            f.exit_code()
        }
    }
}

pub fn main() -> i32 {
    main_with(std::env::args_os())
}
