//! Subcommand implementations.

pub mod bench;
pub mod build_labels;
pub mod evaluate;
pub mod rewrite;
pub mod roundtrip;
pub mod train;

use std::path::{Path, PathBuf};

use sgt_core::corpus::{load_connection_words, load_corpus, Dialogue};
use sgt_core::labeler::{build_labeled_example, LabelConfig, LabelError, LabeledExample};

use crate::config::RunConfig;
use crate::CliError;

/// Read the subcommand's input corpus (`paths.corpus` / `--corpus`).
pub fn read_corpus(config: &RunConfig) -> Result<(PathBuf, Vec<Dialogue>), CliError> {
    let path = config
        .paths
        .corpus
        .clone()
        .ok_or_else(|| CliError::Usage("no input corpus given (use --corpus)".into()))?;
    let load = load_corpus(&path)
        .map_err(|e| CliError::Io(format!("cannot load corpus {}: {e}", path.display())))?;
    if load.skipped > 0 {
        log::warn!("{}: skipped {} malformed line(s)", path.display(), load.skipped);
    }
    log::info!("{}: {} dialogue(s)", path.display(), load.dialogues.len());
    Ok((path, load.dialogues))
}

pub fn connection_words(config: &RunConfig) -> Result<Vec<String>, CliError> {
    match &config.paths.connection_words {
        Some(path) => load_connection_words(path)
            .map_err(|e| CliError::Io(format!("cannot load connection words: {e}"))),
        None => Ok(Vec::new()),
    }
}

pub fn ensure_out_dir(config: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = config.out_dir();
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

/// Run a per-dialogue stage on the configured worker pool. Workers = 1 is
/// plain sequential; anything else goes through rayon with order-preserving
/// collection.
pub fn map_dialogues<T, F>(workers: usize, dialogues: &[Dialogue], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(&Dialogue) -> T + Sync + Send,
{
    if workers == 1 {
        return Ok(dialogues.iter().map(f).collect());
    }
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| dialogues.par_iter().map(f).collect()))
}

/// Label every dialogue, keeping per-dialogue outcomes in input order.
pub fn label_dialogues(
    config: &RunConfig,
    dialogues: &[Dialogue],
    label_config: &LabelConfig,
) -> Result<Vec<Result<LabeledExample, LabelError>>, CliError> {
    map_dialogues(config.workers, dialogues, |d| build_labeled_example(d, label_config))
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<(), CliError> {
    use std::io::Write;
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    for line in lines {
        writeln!(file, "{line}").map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}
