//! Synthetic dialogue generation for round-trip checks, learnability
//! harnesses and benchmarks.
//!
//! References are built by concatenating one to three fragments cut from the
//! generated history. Token surface forms are unique within a dialogue (and
//! optionally across a whole corpus), which guarantees that the greedy
//! labeler can always cover the reference and never needs more fragments
//! than were generated.

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use crate::corpus::{Dialogue, Utterance};
use crate::text_units::detokenize;

/// Shape of the generated dialogues.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub min_utterances: usize,
    pub max_utterances: usize,
    pub min_tokens_per_utterance: usize,
    pub max_tokens_per_utterance: usize,
    pub min_fragments: usize,
    pub max_fragments: usize,
    /// Keep token texts unique across the whole corpus, not just within one
    /// dialogue. Memorization harnesses want this; round-trip checks do not
    /// need it.
    pub unique_across_corpus: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            min_utterances: 2,
            max_utterances: 4,
            min_tokens_per_utterance: 3,
            max_tokens_per_utterance: 8,
            min_fragments: 1,
            max_fragments: 3,
            unique_across_corpus: false,
        }
    }
}

/// Deterministic corpus generator.
pub struct SynthGenerator {
    config: SynthConfig,
    rng: ChaCha20Rng,
    counter: usize,
}

impl SynthGenerator {
    pub fn new(config: SynthConfig, seed: u64) -> Self {
        SynthGenerator { config, rng: ChaCha20Rng::seed_from_u64(seed), counter: 0 }
    }

    /// The `index`-th unique token text. Mixes CJK single characters with
    /// Latin words and digit strings so all granularity classes appear.
    fn token_text(index: usize) -> String {
        match index % 5 {
            0..=2 => {
                // Walk disjoint CJK ranges; each yields a distinct char.
                let i = (index / 5) * 3 + index % 5;
                let ranges: [(u32, u32); 3] =
                    [(0x4E00, 0x9FFF), (0x3400, 0x4DBF), (0xAC00, 0xD7A3)];
                let mut i = i as u32;
                for (start, end) in ranges {
                    let size = end - start + 1;
                    if i < size {
                        return char::from_u32(start + i).expect("valid scalar").to_string();
                    }
                    i -= size;
                }
                panic!("synthetic token pool exhausted at index {index}");
            }
            3 => {
                // Bijective base-26 word: wa, wb, ..., waa, ...
                let mut n = index / 5;
                let mut word = String::from("w");
                loop {
                    word.push(char::from(b'a' + (n % 26) as u8));
                    n /= 26;
                    if n == 0 {
                        break;
                    }
                }
                word
            }
            _ => format!("{}", index / 5 + 10),
        }
    }

    /// Generate the next dialogue: random history plus a reference spliced
    /// from 1..=max_fragments non-overlapping history slices.
    pub fn dialogue(&mut self) -> Dialogue {
        let cfg = self.config.clone();
        if !cfg.unique_across_corpus {
            self.counter = 0;
        }
        let n_utterances = self.rng.gen_range(cfg.min_utterances..=cfg.max_utterances);
        let mut utterances = Vec::with_capacity(n_utterances);
        for u in 0..n_utterances {
            let n_tokens =
                self.rng.gen_range(cfg.min_tokens_per_utterance..=cfg.max_tokens_per_utterance);
            let tokens: Vec<String> = (0..n_tokens)
                .map(|_| {
                    let text = Self::token_text(self.counter);
                    self.counter += 1;
                    text
                })
                .collect();
            let raw = detokenize(&crate::text_units::tokenize(&tokens.join(" ")));
            utterances.push(Utterance::new(raw, (u % 2) as u32, u as i32));
        }

        // Cut non-overlapping fragments. Token uniqueness makes index
        // disjointness equal text disjointness, which keeps the reference
        // coverable by construction.
        let wanted = self.rng.gen_range(cfg.min_fragments..=cfg.max_fragments);
        let mut taken: Vec<Vec<bool>> =
            utterances.iter().map(|u| vec![false; u.tokens.len()]).collect();
        let mut fragments: Vec<Vec<crate::text_units::Token>> = Vec::new();
        let mut attempts = 0;
        while fragments.len() < wanted && attempts < 50 {
            attempts += 1;
            let u = self.rng.gen_range(0..utterances.len());
            let len_u = utterances[u].tokens.len();
            let length = self.rng.gen_range(1..=len_u.min(4));
            let start = self.rng.gen_range(0..=len_u - length);
            if taken[u][start..start + length].iter().any(|&t| t) {
                continue;
            }
            taken[u][start..start + length].iter_mut().for_each(|t| *t = true);
            fragments.push(utterances[u].tokens[start..start + length].to_vec());
        }
        if fragments.is_empty() {
            // Degenerate fallback: copy the current utterance.
            fragments.push(utterances.last().unwrap().tokens.clone());
        }

        let spliced: Vec<crate::text_units::Token> =
            fragments.into_iter().flatten().collect();
        Dialogue { utterances, reference: Some(detokenize(&spliced)) }
    }

    /// Generate a whole corpus.
    pub fn corpus(&mut self, size: usize) -> Vec<Dialogue> {
        (0..size).map(|_| self.dialogue()).collect()
    }
}

/// Convenience: a corpus with the default shape.
pub fn synthetic_corpus(size: usize, seed: u64) -> Vec<Dialogue> {
    SynthGenerator::new(SynthConfig::default(), seed).corpus(size)
}

/// Write dialogues in the canonical dataset format.
pub fn write_corpus_file(dialogues: &[Dialogue], path: &std::path::Path) -> std::io::Result<()> {
    use std::io::Write;
    let mut file = std::fs::File::create(path)?;
    for dialogue in dialogues {
        writeln!(file, "{}", dialogue.to_dataset_line())?;
    }
    Ok(())
}
