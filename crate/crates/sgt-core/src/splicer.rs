//! Inference-time decoding: collect the predicted tag runs per order letter,
//! resolve duplicates, and splice the fragments in alphabetical order.
//!
//! The output can only ever contain tokens of the assembled input: predicted
//! fragments are copied verbatim, and when no fragment is predicted at all
//! the decoder falls back to copying the utterance under rewrite.

use std::collections::BTreeMap;

use crate::corpus::{assemble_input, AssembledInput, Dialogue};
use crate::labeler::{GlcsSpan, TagLabel};
use crate::tagger::{predict_with_scores, TaggerError, TaggerParams};
use crate::text_units::{detokenize, Token};

/// How to pick between multiple runs of the same letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicateResolution {
    /// The run starting latest in the input, mirroring the labeler's
    /// latest-position tie-break.
    #[default]
    LatestRun,
    /// The run with the highest mean predicted probability of its letter;
    /// falls back to latest when no scores are supplied.
    HighestMeanScore,
}

/// What to emit when the tagger predicts no fragment at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmptyFallback {
    /// Copy the utterance under rewrite; a rewriter should degrade to
    /// identity rather than silence.
    #[default]
    CopyLastUtterance,
    EmptyOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecodePolicy {
    pub duplicate_resolution: DuplicateResolution,
    pub empty_fallback: EmptyFallback,
}

/// A maximal contiguous block of one inside label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagRun {
    pub start: usize,
    pub length: usize,
}

/// Group predicted tags into maximal runs per order letter. Separator
/// sentinels and utterance boundaries break runs, matching the labeler's
/// rule that fragments never cross utterances.
pub fn labels_to_runs(tags: &[TagLabel], input: &AssembledInput) -> BTreeMap<usize, Vec<TagRun>> {
    assert_eq!(tags.len(), input.len(), "one tag per token");
    let mut runs: BTreeMap<usize, Vec<TagRun>> = BTreeMap::new();
    let mut current: Option<(usize, TagRun)> = None;

    for (i, tag) in tags.iter().enumerate() {
        let order = match tag {
            TagLabel::Inside(order) if !input.is_separator(i) => Some(*order),
            _ => None,
        };
        let continues = match (&current, order) {
            (Some((open, run)), Some(order)) => {
                *open == order
                    && run.start + run.length == i
                    && input.tokens[i - 1].utterance_index == input.tokens[i].utterance_index
            }
            _ => false,
        };
        if continues {
            current.as_mut().unwrap().1.length += 1;
            continue;
        }
        if let Some((open, run)) = current.take() {
            runs.entry(open).or_default().push(run);
        }
        if let Some(order) = order {
            current = Some((order, TagRun { start: i, length: 1 }));
        }
    }
    if let Some((open, run)) = current {
        runs.entry(open).or_default().push(run);
    }
    runs
}

/// Pick exactly one run per letter. Missing letters are skipped; the
/// surviving fragments keep alphabetical order.
pub fn resolve_runs(
    runs: &BTreeMap<usize, Vec<TagRun>>,
    policy: &DecodePolicy,
    scores: Option<&[Vec<f64>]>,
    tokens: &[Token],
) -> Vec<GlcsSpan> {
    let mut spans = Vec::with_capacity(runs.len());
    for (&order, candidates) in runs {
        let chosen = match (policy.duplicate_resolution, scores) {
            (DuplicateResolution::HighestMeanScore, Some(scores)) => {
                let class = TagLabel::Inside(order).class_index();
                candidates
                    .iter()
                    .map(|run| {
                        let sum: f64 =
                            (run.start..run.start + run.length).map(|i| scores[i][class]).sum();
                        (sum / run.length as f64, run)
                    })
                    .max_by(|(a, ra), (b, rb)| {
                        a.partial_cmp(b).unwrap().then(ra.start.cmp(&rb.start))
                    })
                    .map(|(_, run)| run)
            }
            _ => candidates.iter().max_by_key(|run| run.start),
        };
        if let Some(run) = chosen {
            spans.push(GlcsSpan {
                order,
                start: run.start,
                length: run.length,
                source_utterance: tokens[run.start].utterance_index,
            });
        }
    }
    spans
}

/// Concatenate the fragments in letter order and render them as text.
pub fn splice(spans: &[GlcsSpan], tokens: &[Token]) -> String {
    let mut spans: Vec<&GlcsSpan> = spans.iter().collect();
    spans.sort_by_key(|s| s.order);
    let mut out: Vec<Token> = Vec::new();
    for span in spans {
        out.extend_from_slice(&tokens[span.range()]);
    }
    detokenize(&out)
}

/// Decode a predicted tag track over an assembled input into the rewritten
/// utterance. `fallback_text` is emitted when no fragment was predicted and
/// the policy copies.
pub fn decode(
    input: &AssembledInput,
    tags: &[TagLabel],
    scores: Option<&[Vec<f64>]>,
    policy: &DecodePolicy,
    fallback_text: &str,
) -> String {
    let runs = labels_to_runs(tags, input);
    let spans = resolve_runs(&runs, policy, scores, &input.tokens);
    if spans.is_empty() {
        return match policy.empty_fallback {
            EmptyFallback::CopyLastUtterance => fallback_text.to_string(),
            EmptyFallback::EmptyOutput => String::new(),
        };
    }
    splice(&spans, &input.tokens)
}

/// Full rewrite pipeline: assemble, predict, decode.
pub fn rewrite(
    dialogue: &Dialogue,
    params: &TaggerParams,
    policy: &DecodePolicy,
    connection_words: &[String],
) -> Result<String, TaggerError> {
    let input = assemble_input(dialogue, connection_words, params.config.speaker_width)
        .map_err(|e| TaggerError::BadConfig(e.to_string()))?;
    let (tags, scores) = predict_with_scores(&input, params)?;
    Ok(decode(&input, &tags, Some(&scores), policy, &dialogue.current().raw_text))
}
