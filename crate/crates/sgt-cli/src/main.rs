//! `sgt`: build tag labels from dialogue corpora, train the tagger, rewrite
//! utterances, score predictions, verify the label/splice round trip, and
//! measure single-example latency.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O failure, 3 numeric failure.
//! The `SGT_LOG` environment variable (error|warn|info|debug) controls log
//! verbosity.

mod cmd;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => write!(f, "{m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<sgt_core::corpus::CorpusError> for CliError {
    fn from(e: sgt_core::corpus::CorpusError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<sgt_core::labeler::LabelError> for CliError {
    fn from(e: sgt_core::labeler::LabelError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<sgt_core::tagger::ParamsIoError> for CliError {
    fn from(e: sgt_core::tagger::ParamsIoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<sgt_core::tagger::TaggerError> for CliError {
    fn from(e: sgt_core::tagger::TaggerError) -> Self {
        match e {
            sgt_core::tagger::TaggerError::BadConfig(m) => CliError::Usage(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<sgt_core::metrics::MetricsError> for CliError {
    fn from(e: sgt_core::metrics::MetricsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "sgt",
    version,
    about = "Rewrite incomplete dialogue utterances by tagging and splicing history fragments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Configuration file (TOML sections; flags win).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Input corpus: one dialogue per line, tab-separated, last field the
    /// reference rewrite.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Model parameter file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Connection-word list prepended to every input.
    #[arg(long = "connection-words")]
    pub connection_words: Option<PathBuf>,
    /// Number of tag classes (outside + order letters).
    #[arg(long = "tag-classes")]
    pub tag_classes: Option<usize>,
    /// Decode from gold labels instead of model predictions.
    #[arg(long = "gold-inject")]
    pub gold_inject: bool,
    /// Duplicate-run resolution: latest start or highest mean score.
    #[arg(long, value_parser = ["latest", "score"])]
    pub policy: Option<String>,
    /// Worker threads for per-dialogue stages (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build tag labels from a corpus and report coverage.
    BuildLabels(CommonArgs),
    /// Train the tagger on a labeled corpus.
    Train(CommonArgs),
    /// Rewrite every dialogue of a corpus.
    Rewrite(CommonArgs),
    /// Score a predictions file against a corpus' references.
    Evaluate(EvaluateArgs),
    /// Verify that gold labels splice back into every reference.
    Roundtrip(CommonArgs),
    /// Measure per-example rewrite latency without batching.
    Bench(CommonArgs),
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Predictions file, one rewritten utterance per line.
    predictions: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

fn load_config(args: &CommonArgs) -> Result<config::RunConfig, CliError> {
    let mut config = config::RunConfig::load(args.config.as_deref())?;
    config.apply_overrides(args);
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::BuildLabels(args) => cmd::build_labels::run(&load_config(&args)?),
        Command::Train(args) => cmd::train::run(&load_config(&args)?),
        Command::Rewrite(args) => {
            let config = load_config(&args)?;
            cmd::rewrite::run(&config, args.gold_inject, args.tag_classes)
        }
        Command::Evaluate(args) => {
            let config = load_config(&args.common)?;
            cmd::evaluate::run(&config, &args.predictions)
        }
        Command::Roundtrip(args) => cmd::roundtrip::run(&load_config(&args)?),
        Command::Bench(args) => {
            let config = load_config(&args)?;
            cmd::bench::run(&config, args.gold_inject, args.tag_classes)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SGT_LOG", "warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
