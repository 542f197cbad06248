//! Command-line front end for the activity-recognition benchmark.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 data defect
//! (unreadable or malformed dataset, missing or incompatible report),
//! 3 compute failure (training, prediction or writing artifacts).

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use harbench::evaluation::SplitStrategy;
use harbench::DatasetError;
use thiserror::Error;

use config::{ExperimentConfig, ModelKind};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("data defect: {0}")]
    Data(#[from] DatasetError),
    #[error("data defect: {0}")]
    DataDefect(String),
    #[error("missing report: {}", .0.display())]
    MissingReport(PathBuf),
    #[error("schema version mismatch in {}: expected {expected}, found {found:?}", path.display())]
    SchemaVersionMismatch {
        path: PathBuf,
        expected: u32,
        found: Option<u64>,
    },
    #[error("compute failure: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Data(_)
            | CliError::DataDefect(_)
            | CliError::MissingReport(_)
            | CliError::SchemaVersionMismatch { .. } => 2,
            CliError::Compute(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "harbench",
    version,
    about = "Human activity recognition benchmark"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a dataset directory and report counts and ranges.
    Verify { root: PathBuf },
    /// Run Monte Carlo cross-validation and write report artifacts.
    Run(RunArgs),
    /// Merge run reports with published reference rows, ranked by accuracy.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        /// Directory for comparison.md and comparison.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Feature-pipeline utilities.
    Features {
        #[command(subcommand)]
        command: FeaturesCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum FeaturesCommand {
    /// Recompute the 561 features from the raw windows.
    Compute {
        root: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Flags override the values in `--config`.
#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub root: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// `precomputed` or `channel:<name>`.
    #[arg(long)]
    pub input: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed_base: Option<u64>,
    #[arg(long, value_parser = parse_strategy)]
    pub split_strategy: Option<SplitStrategy>,
}

fn parse_strategy(s: &str) -> Result<SplitStrategy, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown strategy {s:?}; use random, stratified or subject_disjoint"))
}

impl RunArgs {
    fn flags(&self) -> ExperimentConfig {
        ExperimentConfig {
            dataset_root: self.root.clone(),
            model: self.model,
            input: self.input.clone(),
            iterations: self.iterations,
            train_fraction: self.train_fraction,
            seed_base: self.seed_base,
            split_strategy: self.split_strategy,
            output_dir: self.out.clone(),
            ..Default::default()
        }
    }

    pub fn experiment(&self) -> Result<ExperimentConfig, CliError> {
        let file = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(file.overridden_by(self.flags()))
    }
}

pub fn dispatch(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Verify { root } => commands::verify(&root),
        Command::Run(args) => commands::run(&args.experiment()?),
        Command::Report { dirs, out } => commands::report(&dirs, out.as_deref()),
        Command::Features {
            command: FeaturesCommand::Compute { root, out },
        } => commands::features_compute(&root, &out),
    }
}

/// Parses `args`, runs the command, prints its output and returns the exit code.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
