//! `sgt build-labels`: write the labeled-example file and report coverage.

use std::collections::BTreeMap;

use serde::Serialize;
use sgt_core::labeler::write_label_file;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct CoverageReport {
    pub total: usize,
    pub coverable: usize,
    pub coverage_rate: f64,
    /// Fragment-count histogram over coverable examples.
    pub fragment_histogram: BTreeMap<usize, usize>,
    /// Share of coverable examples needing at most three fragments.
    pub at_most_three_fragments: f64,
    pub config_hash: String,
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let (_, dialogues) = super::read_corpus(config)?;
    let words = super::connection_words(config)?;
    let label_config = config.label_config(words);
    let outcomes = super::label_dialogues(config, &dialogues, &label_config)?;

    let mut examples = Vec::new();
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(example) => {
                *histogram.entry(example.spans.len()).or_insert(0) += 1;
                examples.push(example);
            }
            Err(e) => log::warn!("dialogue {}: skipped ({e})", index + 1),
        }
    }

    let out_dir = super::ensure_out_dir(config)?;
    let label_path = out_dir.join("labels.jsonl");
    write_label_file(&examples, &label_path)?;

    let total = dialogues.len();
    let coverable = examples.len();
    let small = histogram.iter().filter(|(&n, _)| n <= 3).map(|(_, &c)| c).sum::<usize>();
    let report = CoverageReport {
        total,
        coverable,
        coverage_rate: if total == 0 { 0.0 } else { coverable as f64 / total as f64 },
        at_most_three_fragments: if coverable == 0 { 0.0 } else { small as f64 / coverable as f64 },
        fragment_histogram: histogram,
        config_hash: config.config_hash(),
    };
    let report_path = out_dir.join("coverage.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&report).unwrap())
        .map_err(|e| CliError::Io(e.to_string()))?;

    println!("labeled {coverable}/{total} dialogues ({:.2}% coverage)", report.coverage_rate * 100.0);
    println!("fragment histogram:");
    for (fragments, count) in &report.fragment_histogram {
        println!("  {fragments} fragment(s): {count}");
    }
    println!("<=3 fragments: {:.2}%", report.at_most_three_fragments * 100.0);
    println!("labels: {}", label_path.display());
    println!("report: {}", report_path.display());
    Ok(())
}
