//! `sgt roundtrip`: label every coverable dialogue, splice the gold labels
//! back, and require an exact match with the normalized reference.

use sgt_core::labeler::gold_splice;
use sgt_core::text_units::normalize_text;

use crate::config::RunConfig;
use crate::CliError;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let (_, dialogues) = super::read_corpus(config)?;
    let words = super::connection_words(config)?;
    let label_config = config.label_config(words);
    let outcomes = super::label_dialogues(config, &dialogues, &label_config)?;

    let mut checked = 0usize;
    let mut excluded = 0usize;
    let mut mismatches = 0usize;
    for (index, (dialogue, outcome)) in dialogues.iter().zip(outcomes).enumerate() {
        match outcome {
            Err(e) => {
                excluded += 1;
                log::info!("dialogue {}: excluded ({e})", index + 1);
            }
            Ok(example) => {
                checked += 1;
                let expected = normalize_text(dialogue.reference.as_deref().unwrap_or_default());
                let spliced = gold_splice(&example);
                if spliced != expected {
                    mismatches += 1;
                    println!("mismatch at line {}:", index + 1);
                    println!("  expected: {expected}");
                    println!("  spliced:  {spliced}");
                }
            }
        }
    }

    println!("checked {checked} dialogue(s), excluded {excluded}, mismatches {mismatches}");
    if mismatches > 0 {
        return Err(CliError::Numeric(format!("{mismatches} splice mismatch(es)")));
    }
    println!("roundtrip: PASS");
    Ok(())
}
