//! Scenario-driven front end for the majorant certificate toolkit.
//!
//! Scenarios are TOML files dispatched by `kind` to certificate
//! verification, system simulation, closed-form designers, the discrete
//! verifier, comparison checks, or blow-up detection. Every run writes a
//! `report.txt` of `key: value` lines plus CSV tables, and exits 0 when the
//! checked property holds, 1 when it does not (not certified, infeasible,
//! bound violated), and 2 on usage or runtime errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod runner;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Kind, ScenarioConfig};
use runner::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid config field {field}: {message}")]
    Validation { field: String, message: String },
    #[error("unknown sweep parameter \"{name}\"")]
    UnknownParameter { name: String },
    #[error("config kind is {got}, expected {expected}")]
    KindMismatch { expected: Kind, got: Kind },
    #[error(transparent)]
    Core(#[from] majorant::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "majorant",
    version,
    about = "Certify large-time bounds of evolution problems from scenario files"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify a majorant certificate and cross-validate the bound.
    Certify(RunArgs),
    /// Integrate an evolution system and check declared properties.
    Simulate(RunArgs),
    /// Run a closed-form certificate designer.
    Design(RunArgs),
    /// Verify a discrete certificate against the worst-case recursion.
    Discrete(RunArgs),
    /// Check the comparison property for a pair of scalar problems.
    Compare(RunArgs),
    /// Detect finite-time escape and compare against the closed form.
    Blowup(RunArgs),
    /// Re-run a design or certify scenario across parameter values.
    Sweep(SweepArgs),
    /// Run every scenario file in a directory.
    Batch(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (directory for `batch`).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: the scenario's own, then `out/<name>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the verification grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Override the time horizon.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Suppress the report on stdout (files are still written).
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Parameter to sweep (falls back to the scenario's `[sweep]` block).
    #[arg(long)]
    pub param: Option<String>,
    /// Comma-separated parameter values.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            grid: self.grid,
            horizon: self.horizon,
        }
    }
}

fn expect_kind(config: &ScenarioConfig, expected: Kind) -> Result<(), CliError> {
    if config.kind == expected {
        Ok(())
    } else {
        Err(CliError::KindMismatch {
            expected,
            got: config.kind,
        })
    }
}

fn run_one(args: &RunArgs, expected: Kind) -> Result<i32, CliError> {
    let config = ScenarioConfig::from_path(&args.config)?;
    expect_kind(&config, expected)?;
    let outcome = runner::run_scenario(&config, &args.overrides())?;
    if !args.quiet {
        print!("{}", outcome.report.to_text());
    }
    Ok(outcome.exit)
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Certify(args) => run_one(args, Kind::Certify),
        Command::Simulate(args) => run_one(args, Kind::Simulate),
        Command::Design(args) => run_one(args, Kind::Design),
        Command::Discrete(args) => run_one(args, Kind::Discrete),
        Command::Compare(args) => run_one(args, Kind::Compare),
        Command::Blowup(args) => run_one(args, Kind::Blowup),
        Command::Sweep(args) => (|| {
            let config = ScenarioConfig::from_path(&args.run.config)?;
            let (param, values) = match (&args.param, &args.values) {
                (Some(p), Some(v)) => (p.clone(), v.clone()),
                _ => match &config.sweep {
                    Some(block) => (block.parameter.clone(), block.values.clone()),
                    None => {
                        return Err(CliError::Validation {
                            field: "sweep".into(),
                            message:
                                "pass --param and --values or add a [sweep] block to the scenario"
                                    .into(),
                        })
                    }
                },
            };
            let outcome =
                runner::run_sweep(&config, &param, &values, &args.run.overrides())?;
            if !args.run.quiet {
                println!(
                    "sweep {param}: {} rows -> {}",
                    outcome.rows,
                    outcome.out_dir.join("summary.csv").display()
                );
            }
            Ok(0)
        })(),
        Command::Batch(args) => (|| {
            let outcome = runner::run_batch(&args.config, &args.overrides())?;
            if !args.quiet {
                for (name, exit) in &outcome.rows {
                    println!("{name}: exit {exit}");
                }
            }
            Ok(outcome.exit)
        })(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Parses an argument vector and runs it; the test-suite entry point.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            eprint!("{e}");
            2
        }
    }
}
