//! `sgt rewrite`: emit one rewritten utterance per input dialogue, in input
//! order. With `--gold-inject` the decoder runs on gold labels instead of
//! model predictions, which reproduces the reference on every coverable
//! dialogue.

use sgt_core::labeler::build_labeled_example;
use sgt_core::splicer::{decode, rewrite};
use sgt_core::tagger::{load_params, load_params_expecting};

use crate::config::RunConfig;
use crate::CliError;

pub fn run(config: &RunConfig, gold_inject: bool, expect_classes: Option<usize>) -> Result<(), CliError> {
    let (_, dialogues) = super::read_corpus(config)?;
    let words = super::connection_words(config)?;
    let policy = config.decode_policy();

    let predictions: Vec<String> = if gold_inject {
        let label_config = config.label_config(words);
        super::map_dialogues(config.workers, &dialogues, |dialogue| {
            match build_labeled_example(dialogue, &label_config) {
                Ok(example) => decode(
                    &example.input,
                    &example.y_sgt,
                    None,
                    &policy,
                    &dialogue.current().raw_text,
                ),
                Err(e) => {
                    log::debug!("uncoverable dialogue, copying current utterance: {e}");
                    dialogue.current().raw_text.clone()
                }
            }
        })?
    } else {
        let model_path = config
            .paths
            .model
            .clone()
            .ok_or_else(|| CliError::Usage("no model file given (use --model)".into()))?;
        let params = match expect_classes {
            Some(classes) => load_params_expecting(&model_path, classes, config.encoder.speaker_width)?,
            None => load_params(&model_path)?,
        };
        let results = super::map_dialogues(config.workers, &dialogues, |dialogue| {
            rewrite(dialogue, &params, &policy, &words)
        })?;
        results.into_iter().collect::<Result<Vec<_>, _>>()?
    };

    let out_dir = super::ensure_out_dir(config)?;
    let out_path = out_dir.join("predictions.txt");
    super::write_lines(&out_path, &predictions)?;
    println!("wrote {} prediction(s) to {}", predictions.len(), out_path.display());
    Ok(())
}
