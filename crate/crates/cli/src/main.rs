//! `onhold`: find source comments that wait on a date, a release or a bug
//! fix, and say what they are waiting for.
//!
//! Exit status is 0 on success, 2 for bad input and 1 for internal errors.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tempfile::NamedTempFile;

use config::{out_dir, GlobalArgs, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "onhold",
    version,
    about = "Detect on-hold technical debt in source comments"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract comments from a source tree into a dataset CSV
    Mine {
        /// Root of the source tree
        #[arg(long)]
        root: PathBuf,
        /// File extensions to read
        #[arg(long, default_values = ["java"])]
        ext: Vec<String>,
    },
    /// Train a classifier and write the model file
    Train,
    /// Compare the keyword baseline, unigram and n-gram classifiers
    Evaluate,
    /// Score comments with a trained model and extract their conditions
    Classify {
        /// Model file written by `train`
        #[arg(long)]
        model: PathBuf,
        /// Classify comments mined from this tree instead of --dataset
        #[arg(long)]
        source: Option<PathBuf>,
        /// File extensions to read with --source
        #[arg(long, default_values = ["java"])]
        ext: Vec<String>,
    },
    /// Extract waiting conditions from every comment in a dataset
    DetectConditions {
        /// Only look at rows labeled on_hold
        #[arg(long)]
        on_hold_only: bool,
    },
    /// Run the keyword baseline over a labeled dataset
    Baseline {
        /// Comma-separated keywords replacing the default eight
        #[arg(long, value_delimiter = ',')]
        keywords: Vec<String>,
    },
    /// Show the highest-weighted n-gram features of a dataset
    Features {
        /// How many features to list
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

/// Write through a temporary file in the target directory, then rename, so
/// a failed run never leaves a partial file behind.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(out) = out else {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::input(format!("cannot write to stdout: {e}")));
    };
    let fail = |e: std::io::Error| CliError::input(format!("cannot write {}: {e}", out.display()));
    let mut tmp = NamedTempFile::new_in(out_dir(out)).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(out).map_err(|e| fail(e.error))?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let bytes = match &cli.command {
        Command::Mine { root, ext } => commands::mine(&cfg, root, ext)?,
        Command::Train => commands::train(&cfg)?,
        Command::Evaluate => commands::evaluate(&cfg)?,
        Command::Classify { model, source, ext } => commands::classify(&cfg, model, source.as_deref(), ext)?,
        Command::DetectConditions { on_hold_only } => commands::detect(&cfg, *on_hold_only)?,
        Command::Baseline { keywords } => commands::baseline(&cfg, keywords)?,
        Command::Features { top } => commands::features(&cfg, *top)?,
    };
    emit(cfg.out.as_deref(), &bytes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("onhold: {e}");
            ExitCode::from(e.code)
        }
        // the panic hook has already printed the message
        Err(_) => ExitCode::from(error::EXIT_INTERNAL),
    }
}
