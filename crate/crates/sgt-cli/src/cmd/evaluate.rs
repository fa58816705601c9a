//! `sgt evaluate`: score a predictions file against the references of a
//! corpus and write machine- and human-readable reports.

use std::path::Path;

use serde::Serialize;
use sgt_core::metrics::{evaluate_corpus, MetricReport};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Serialize)]
struct ReportFile<'a> {
    #[serde(flatten)]
    report: &'a MetricReport,
    config_hash: String,
}

pub fn run(config: &RunConfig, predictions_path: &Path) -> Result<(), CliError> {
    let (_, dialogues) = super::read_corpus(config)?;
    let text = std::fs::read_to_string(predictions_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", predictions_path.display())))?;
    let predictions: Vec<String> = text.lines().map(str::to_string).collect();

    let report = evaluate_corpus(&predictions, &dialogues)?;

    let out_dir = super::ensure_out_dir(config)?;
    let json_path = out_dir.join("report.json");
    let file = ReportFile { report: &report, config_hash: config.config_hash() };
    std::fs::write(&json_path, serde_json::to_string_pretty(&file).unwrap())
        .map_err(|e| CliError::Io(e.to_string()))?;
    let table = report.to_table();
    let table_path = out_dir.join("report.txt");
    std::fs::write(&table_path, &table).map_err(|e| CliError::Io(e.to_string()))?;

    print!("{table}");
    println!("report: {}", json_path.display());
    Ok(())
}
