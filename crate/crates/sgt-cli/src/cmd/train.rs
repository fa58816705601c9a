//! `sgt train`: build labels in memory, train the tagger, write the model
//! file and the per-epoch log.

use std::fmt::Write as _;

use sgt_core::corpus::load_corpus;
use sgt_core::labeler::LabeledExample;
use sgt_core::tagger::{save_params, train};

use crate::config::RunConfig;
use crate::CliError;

fn labeled_or_skip(
    config: &RunConfig,
    dialogues: &[sgt_core::corpus::Dialogue],
    label_config: &sgt_core::labeler::LabelConfig,
    what: &str,
) -> Result<Vec<LabeledExample>, CliError> {
    let outcomes = super::label_dialogues(config, dialogues, label_config)?;
    let mut examples = Vec::new();
    let mut skipped = 0usize;
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(example) => examples.push(example),
            Err(e) => {
                skipped += 1;
                log::debug!("{what} dialogue {}: skipped ({e})", index + 1);
            }
        }
    }
    if skipped > 0 {
        log::warn!("{what}: skipped {skipped} uncoverable dialogue(s)");
    }
    Ok(examples)
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let train_path = config
        .paths
        .train_corpus
        .clone()
        .or_else(|| config.paths.corpus.clone())
        .ok_or_else(|| CliError::Usage("no training corpus given (use --corpus)".into()))?;
    let load = load_corpus(&train_path)
        .map_err(|e| CliError::Io(format!("cannot load corpus {}: {e}", train_path.display())))?;
    let words = super::connection_words(config)?;
    let label_config = config.label_config(words);
    let examples = labeled_or_skip(config, &load.dialogues, &label_config, "train")?;
    if examples.is_empty() {
        return Err(CliError::Usage("training corpus has no coverable dialogues".into()));
    }

    let dev_examples = match &config.paths.dev_corpus {
        Some(path) => {
            let dev = load_corpus(path)
                .map_err(|e| CliError::Io(format!("cannot load corpus {}: {e}", path.display())))?;
            Some(labeled_or_skip(config, &dev.dialogues, &label_config, "dev")?)
        }
        None => None,
    };

    let outcome = train(
        &examples,
        dev_examples.as_deref(),
        &config.model_config(),
        &config.train_config(),
    )?;

    let out_dir = super::ensure_out_dir(config)?;
    let model_path =
        config.paths.model.clone().unwrap_or_else(|| out_dir.join("model.sgtm"));
    save_params(&outcome.params, &model_path)?;

    let mut log_text = String::new();
    for stats in &outcome.log {
        writeln!(
            log_text,
            "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
            stats.epoch,
            stats.loss_sgt,
            stats.loss_gd,
            stats.loss_ged,
            stats.loss_final,
            stats.token_accuracy
        )
        .unwrap();
    }
    let log_path = out_dir.join("train.log");
    std::fs::write(&log_path, log_text).map_err(|e| CliError::Io(e.to_string()))?;

    if let Some(epoch) = outcome.diverged_at {
        return Err(CliError::Numeric(format!(
            "non-finite loss at epoch {epoch}; last good checkpoint kept at {}",
            model_path.display()
        )));
    }

    let last = outcome.log.last().expect("at least one epoch");
    println!(
        "trained {} example(s) for {} epoch(s): final loss {:.6}, token accuracy {:.4}",
        examples.len(),
        outcome.log.len(),
        last.loss_final,
        last.token_accuracy
    );
    println!("class weights: {:?}", outcome.class_weights);
    println!("model: {}", model_path.display());
    println!("log:   {}", log_path.display());
    Ok(())
}
