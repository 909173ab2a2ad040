//! Command-line front end.
//!
//! ```text
//! gegenorm <table|verify|asymptote|bench> --lambda <list> --max-n <int>
//!          [--mode exact|float] [--format csv|json] [--out <path>] [--seed <int>]
//! ```
//!
//! Exit codes: 0 success, 1 identity failure, 2 invalid arguments or domain,
//! 3 I/O failure or internal mismatch.

mod commands;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::exactpoly::ratio;
use crate::gegenbauer::{Lambda, LambdaError};
use crate::normtheory::{degree_budget, Mode};

pub use commands::{
    bench_exact, cmd_asymptote, cmd_bench, cmd_table, cmd_verify, table_columns, BenchTiming,
    Counterexample, IdentityTally, VerificationReport, CLOSED_FORM_NOTE,
};
pub use report::{Cell, Column, ColumnKind, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Table,
    Verify,
    Asymptote,
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "gegenorm",
    version,
    about = "L²-norms of Gegenbauer polynomials on [0, 1]"
)]
struct Args {
    command: Command,
    /// Comma-separated indices: `p/q`, integers or exact decimals.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long = "max-n")]
    max_n: Option<usize>,
    /// Comma-separated degrees for `asymptote`.
    #[arg(long = "n")]
    ns: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Perturbs one lifted norm before verification.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub lambdas: Vec<Lambda>,
    pub max_n: usize,
    /// Explicit degree grid for `asymptote`.
    pub ns: Option<Vec<usize>>,
    pub mode: Mode,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Exact-mode degree cap.
    pub budget: usize,
    pub inject_fault: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] LambdaError),
    #[error("identity check failed: {0}")]
    IdentityFailure(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::IdentityFailure(_) => 1,
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) | CliError::Domain(_) => 2,
            CliError::Io(_) | CliError::Mismatch(_) => 3,
        }
    }
}

pub const DEFAULT_SWEEP: [(i64, i64); 7] =
    [(-1, 4), (1, 4), (1, 2), (1, 1), (3, 2), (2, 1), (5, 2)];
pub const ASYMPTOTE_SWEEP: [(i64, i64); 6] = [(1, 4), (1, 2), (3, 4), (3, 2), (2, 1), (5, 2)];

fn default_lambdas(command: Command) -> Vec<Lambda> {
    let list: &[(i64, i64)] = match command {
        Command::Asymptote => &ASYMPTOTE_SWEEP,
        _ => &DEFAULT_SWEEP,
    };
    list.iter()
        .map(|&(n, d)| Lambda::new(ratio(n, d)).expect("valid default"))
        .collect()
}

fn default_max_n(command: Command) -> usize {
    match command {
        Command::Table | Command::Verify => 30,
        Command::Asymptote => 512,
        Command::Bench => 64,
    }
}

pub fn parse_lambda_list(text: &str) -> Result<Vec<Lambda>, LambdaError> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Parses command-line arguments (including the program name) into a config.
pub fn parse_config<I, T>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(args)?;
    let lambdas = match &args.lambda {
        Some(text) => parse_lambda_list(text)?,
        None => default_lambdas(args.command),
    };
    if lambdas.is_empty() {
        return Err(CliError::Usage("--lambda needs at least one value".into()));
    }
    let ns = args
        .ns
        .as_deref()
        .map(|text| {
            text.split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(format!("--n: {e}")))
        })
        .transpose()?;
    Ok(RunConfig {
        command: args.command,
        lambdas,
        max_n: args.max_n.unwrap_or(default_max_n(args.command)),
        ns,
        mode: match args.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        },
        format: args.format,
        out: args.out,
        seed: args.seed,
        budget: degree_budget(),
        inject_fault: args.inject_fault,
    })
}

impl RunConfig {
    pub fn to_json(&self) -> Value {
        json!({
            "command": format!("{:?}", self.command).to_lowercase(),
            "lambda": self.lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "max_n": self.max_n,
            "n": self.ns,
            "mode": match self.mode { Mode::Exact => "exact", Mode::Float => "float" },
            "seed": self.seed,
            "degree_budget": self.budget,
        })
    }
}

/// A finished command: its report, and the failure to signal after the
/// report has been written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub failure: Option<CliError>,
}

/// Runs one command.
pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    let mut failure = None;
    let mut report = match config.command {
        Command::Table => cmd_table(config)?,
        Command::Verify => {
            let verification = cmd_verify(config)?;
            if let Some(c) = &verification.first_failure {
                failure = Some(CliError::IdentityFailure(c.to_string()));
            }
            verification.into_report()
        }
        Command::Asymptote => cmd_asymptote(config)?,
        Command::Bench => cmd_bench(config)?,
    };
    report.config = config.to_json();
    Ok(Outcome { report, failure })
}

pub fn render(report: &Report, format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Csv => report
            .to_csv()
            .map_err(|e| CliError::Io(std::io::Error::other(e))),
        OutputFormat::Json => Ok(format!("{:#}\n", report.to_json())),
    }
}

fn write_output(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Full CLI run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match parse_config(args) {
        Ok(config) => config,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(e) => {
            eprintln!("gegenorm: {e}");
            return e.exit_code();
        }
    };
    let outcome = execute(&config).and_then(|Outcome { report, failure }| {
        if config.format == OutputFormat::Csv && !report.summary.is_null() {
            eprintln!("{:#}", report.summary);
        }
        write_output(&config, &render(&report, config.format)?)?;
        failure.map_or(Ok(()), Err)
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gegenorm: {e}");
            e.exit_code()
        }
    }
}
