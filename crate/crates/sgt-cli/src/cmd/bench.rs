//! `sgt bench`: single-example rewrite latency, strictly one dialogue at a
//! time on one thread. File I/O happens before the timed region; with
//! `--gold-inject` only the decode path (runs, resolution, splice) is timed.

use std::time::Instant;

use serde::Serialize;
use sgt_core::corpus::assemble_input;
use sgt_core::labeler::build_labeled_example;
use sgt_core::splicer::{decode, rewrite};
use sgt_core::tagger::{load_params, load_params_expecting};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct BenchReport {
    pub mode: &'static str,
    pub examples: usize,
    pub repetitions: usize,
    pub warmup: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub tokens_per_second: f64,
    pub total_tokens: usize,
    pub config_hash: String,
}

fn percentile(sorted: &[f64], fraction: f64) -> f64 {
    let index = ((sorted.len() as f64 - 1.0) * fraction).round() as usize;
    sorted[index]
}

pub fn run(config: &RunConfig, gold_inject: bool, expect_classes: Option<usize>) -> Result<(), CliError> {
    if config.bench.repetitions == 0 {
        return Err(CliError::Usage("bench repetitions must be at least 1".into()));
    }
    let (_, dialogues) = super::read_corpus(config)?;
    if dialogues.is_empty() {
        return Err(CliError::Usage("bench corpus is empty".into()));
    }
    let words = super::connection_words(config)?;
    let policy = config.decode_policy();

    // Everything I/O- or setup-shaped happens here, outside the timed region.
    let mut latencies: Vec<f64> = Vec::new();
    let mut total_tokens = 0usize;
    let mode;
    if gold_inject {
        mode = "decode-only";
        let label_config = config.label_config(words);
        let mut prepared = Vec::new();
        for (index, dialogue) in dialogues.iter().enumerate() {
            match build_labeled_example(dialogue, &label_config) {
                Ok(example) => prepared.push((example, dialogue.current().raw_text.clone())),
                Err(e) => log::info!("dialogue {}: excluded from bench ({e})", index + 1),
            }
        }
        if prepared.is_empty() {
            return Err(CliError::Usage("no coverable dialogues to bench".into()));
        }
        for i in 0..config.bench.warmup {
            let (example, fallback) = &prepared[i % prepared.len()];
            std::hint::black_box(decode(&example.input, &example.y_sgt, None, &policy, fallback));
        }
        for _ in 0..config.bench.repetitions {
            for (example, fallback) in &prepared {
                let start = Instant::now();
                let out = decode(&example.input, &example.y_sgt, None, &policy, fallback);
                latencies.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(out);
                total_tokens += example.input.len();
            }
        }
    } else {
        mode = "rewrite";
        let model_path = config
            .paths
            .model
            .clone()
            .ok_or_else(|| CliError::Usage("no model file given (use --model)".into()))?;
        let params = match expect_classes {
            Some(classes) => load_params_expecting(&model_path, classes, config.encoder.speaker_width)?,
            None => load_params(&model_path)?,
        };
        for i in 0..config.bench.warmup {
            let dialogue = &dialogues[i % dialogues.len()];
            std::hint::black_box(rewrite(dialogue, &params, &policy, &words)?);
        }
        for _ in 0..config.bench.repetitions {
            for dialogue in &dialogues {
                let start = Instant::now();
                let out = rewrite(dialogue, &params, &policy, &words)?;
                latencies.push(start.elapsed().as_secs_f64() * 1e3);
                std::hint::black_box(out);
                let input = assemble_input(dialogue, &words, params.config.speaker_width)?;
                total_tokens += input.len();
            }
        }
    }

    latencies.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = latencies.iter().sum::<f64>() / latencies.len() as f64;
    let report = BenchReport {
        mode,
        examples: latencies.len() / config.bench.repetitions,
        repetitions: config.bench.repetitions,
        warmup: config.bench.warmup,
        mean_ms: mean,
        median_ms: percentile(&latencies, 0.5),
        p95_ms: percentile(&latencies, 0.95),
        tokens_per_second: total_tokens as f64 / (latencies.iter().sum::<f64>() / 1e3),
        total_tokens,
        config_hash: config.config_hash(),
    };

    let out_dir = super::ensure_out_dir(config)?;
    let json_path = out_dir.join("bench.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(&report).unwrap())
        .map_err(|e| CliError::Io(e.to_string()))?;

    println!("bench mode:      {}", report.mode);
    println!("examples:        {} x {} repetition(s)", report.examples, report.repetitions);
    println!("mean latency:    {:.4} ms", report.mean_ms);
    println!("median latency:  {:.4} ms", report.median_ms);
    println!("p95 latency:     {:.4} ms", report.p95_ms);
    println!("throughput:      {:.0} tokens/s", report.tokens_per_second);
    println!("report: {}", json_path.display());
    Ok(())
}
