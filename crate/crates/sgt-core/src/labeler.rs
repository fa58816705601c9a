//! Training-label construction: decompose the reference rewrite into ordered
//! fragments found contiguously in the assembled input, then emit the three
//! label tracks the tagger learns from.
//!
//! The decomposition is greedy. At each step the longest prefix of the
//! remaining reference that occurs contiguously inside a single matchable
//! region (one utterance, or the connection-word prefix) is claimed as the
//! next fragment; equal-length candidates resolve to the latest start
//! position in the input. Tokens already claimed by an earlier fragment are
//! not re-claimable, so a reference is coverable only if every fragment it
//! needs is still available.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::{assemble_input, AssembledInput, Dialogue};
use crate::text_units::{detokenize, tokenize, Token};

/// Default number of tag classes: outside plus ten order letters. Corpus
/// statistics show almost all rewrites decompose into three fragments or
/// fewer, so ten letters leaves ample headroom.
pub const DEFAULT_TAG_CLASSES: usize = 11;

#[derive(Debug, Error)]
pub enum LabelError {
    /// The reference cannot be composed from unclaimed input tokens; carries
    /// the unmatched remainder for diagnostics.
    #[error("reference not coverable: {} token(s) left unmatched starting at {:?}",
            residue.len(), residue.first().map(|t| t.text.as_str()).unwrap_or(""))]
    Uncoverable { residue: Vec<Token> },
    #[error("span order {order} does not fit in {tag_classes} tag classes")]
    OrderOverflow { order: usize, tag_classes: usize },
    #[error("dialogue has no reference rewrite")]
    MissingReference,
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
}

/// One ordered fragment of the reference: order 0 is tag A, 1 is B, and so
/// on. `start` indexes the assembled input; `source_utterance` is -1 when
/// the fragment came from the connection-word prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlcsSpan {
    pub order: usize,
    pub start: usize,
    pub length: usize,
    pub source_utterance: i32,
}

impl GlcsSpan {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.length
    }
}

/// Per-token tag: outside any fragment, or inside the fragment with the
/// given order (0 ↔ A, 1 ↔ B, …).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TagLabel {
    Outside,
    Inside(usize),
}

impl TagLabel {
    /// Class index used by the model heads: O is 0, I-A is 1, I-B is 2, …
    pub fn class_index(self) -> usize {
        match self {
            TagLabel::Outside => 0,
            TagLabel::Inside(order) => order + 1,
        }
    }

    pub fn from_class_index(index: usize) -> TagLabel {
        if index == 0 {
            TagLabel::Outside
        } else {
            TagLabel::Inside(index - 1)
        }
    }

    pub fn is_inside(self) -> bool {
        matches!(self, TagLabel::Inside(_))
    }

    /// Letter name for an order: A..Z, then numeric beyond that.
    pub fn order_name(order: usize) -> String {
        if order < 26 {
            char::from(b'A' + order as u8).to_string()
        } else {
            format!("{order}")
        }
    }
}

impl fmt::Display for TagLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TagLabel::Outside => write!(f, "O"),
            TagLabel::Inside(order) => write!(f, "I-{}", TagLabel::order_name(*order)),
        }
    }
}

impl FromStr for TagLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(TagLabel::Outside);
        }
        let name = s.strip_prefix("I-").ok_or_else(|| format!("bad tag label {s:?}"))?;
        let bytes = name.as_bytes();
        if bytes.len() == 1 && bytes[0].is_ascii_uppercase() {
            Ok(TagLabel::Inside((bytes[0] - b'A') as usize))
        } else {
            name.parse::<usize>()
                .map(TagLabel::Inside)
                .map_err(|_| format!("bad tag label {s:?}"))
        }
    }
}

impl Serialize for TagLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TagLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Settings for label construction.
#[derive(Debug, Clone)]
pub struct LabelConfig {
    pub tag_classes: usize,
    pub connection_words: Vec<String>,
    pub speaker_width: usize,
}

impl Default for LabelConfig {
    fn default() -> Self {
        LabelConfig {
            tag_classes: DEFAULT_TAG_CLASSES,
            connection_words: Vec::new(),
            speaker_width: 1,
        }
    }
}

/// An assembled input together with its three gold label tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub input: AssembledInput,
    pub y_sgt: Vec<TagLabel>,
    pub y_gd: Vec<u8>,
    pub y_ged: Vec<u8>,
    pub spans: Vec<GlcsSpan>,
}

/// Longest prefix of `remainder` that occurs contiguously in `region`.
/// Returns the start position in `region` and the match length; among
/// equal-length maximal matches the rightmost start wins. `None` when not
/// even the first token occurs.
pub fn longest_prefix_match(remainder: &[Token], region: &[Token]) -> Option<(usize, usize)> {
    longest_prefix_match_masked(remainder, region, None)
}

/// As [`longest_prefix_match`], but positions where `claimed` is true are
/// unavailable and break contiguity.
fn longest_prefix_match_masked(
    remainder: &[Token],
    region: &[Token],
    claimed: Option<&[bool]>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for start in 0..region.len() {
        let mut len = 0;
        while len < remainder.len()
            && start + len < region.len()
            && !claimed.is_some_and(|c| c[start + len])
            && region[start + len].matches(&remainder[len])
        {
            len += 1;
        }
        if len > 0 && best.is_none_or(|(_, l)| len >= l) {
            best = Some((start, len));
        }
    }
    best
}

/// Greedily decompose `reference` into ordered fragments of `input`.
///
/// Fails with [`LabelError::Uncoverable`] when some step finds no match or
/// when more fragments would be needed than the tag alphabet admits.
pub fn build_glcs_spans(
    input: &AssembledInput,
    reference: &[Token],
    tag_classes: usize,
) -> Result<Vec<GlcsSpan>, LabelError> {
    let max_spans = tag_classes.saturating_sub(1);
    let regions = input.regions();
    let mut claimed = vec![false; input.len()];
    let mut spans: Vec<GlcsSpan> = Vec::new();
    let mut remainder = reference;

    while !remainder.is_empty() {
        if spans.len() == max_spans {
            return Err(LabelError::Uncoverable { residue: remainder.to_vec() });
        }
        // Best candidate over all regions: longest match first, then the
        // latest absolute start position in the input.
        let mut best: Option<(usize, usize, i32)> = None; // (abs_start, len, source)
        for region in &regions {
            let tokens = &input.tokens[region.range()];
            let mask = &claimed[region.range()];
            if let Some((pos, len)) = longest_prefix_match_masked(remainder, tokens, Some(mask)) {
                let abs = region.start + pos;
                let better = match best {
                    None => true,
                    Some((b_abs, b_len, _)) => len > b_len || (len == b_len && abs > b_abs),
                };
                if better {
                    best = Some((abs, len, region.source_utterance));
                }
            }
        }
        let Some((start, length, source_utterance)) = best else {
            return Err(LabelError::Uncoverable { residue: remainder.to_vec() });
        };
        claimed[start..start + length].iter_mut().for_each(|c| *c = true);
        spans.push(GlcsSpan { order: spans.len(), start, length, source_utterance });
        remainder = &remainder[length..];
    }
    Ok(spans)
}

/// Tag track: tokens inside the fragment with order k get I-k, others O.
pub fn spans_to_sgt_labels(
    spans: &[GlcsSpan],
    len: usize,
    tag_classes: usize,
) -> Result<Vec<TagLabel>, LabelError> {
    let mut labels = vec![TagLabel::Outside; len];
    for span in spans {
        if span.order + 1 >= tag_classes {
            return Err(LabelError::OrderOverflow { order: span.order, tag_classes });
        }
        for i in span.range() {
            labels[i] = TagLabel::Inside(span.order);
        }
    }
    Ok(labels)
}

/// Detection track: 1 inside any fragment.
pub fn spans_to_gd_labels(spans: &[GlcsSpan], len: usize) -> Vec<u8> {
    let mut labels = vec![0u8; len];
    for span in spans {
        for i in span.range() {
            labels[i] = 1;
        }
    }
    labels
}

/// Edge track: fragments of one or two tokens are marked 1 throughout;
/// longer fragments mark only their first and last token.
pub fn spans_to_ged_labels(spans: &[GlcsSpan], len: usize) -> Vec<u8> {
    let mut labels = vec![0u8; len];
    for span in spans {
        if span.length <= 2 {
            for i in span.range() {
                labels[i] = 1;
            }
        } else {
            labels[span.start] = 1;
            labels[span.start + span.length - 1] = 1;
        }
    }
    labels
}

/// Assemble a dialogue and build all label tracks from its reference.
pub fn build_labeled_example(
    dialogue: &Dialogue,
    config: &LabelConfig,
) -> Result<LabeledExample, LabelError> {
    let reference = dialogue.reference.as_deref().ok_or(LabelError::MissingReference)?;
    let input = assemble_input(dialogue, &config.connection_words, config.speaker_width)?;
    let reference_tokens = tokenize(reference);
    if reference_tokens.is_empty() {
        return Err(LabelError::Uncoverable { residue: Vec::new() });
    }
    let spans = build_glcs_spans(&input, &reference_tokens, config.tag_classes)?;
    let y_sgt = spans_to_sgt_labels(&spans, input.len(), config.tag_classes)?;
    let y_gd = spans_to_gd_labels(&spans, input.len());
    let y_ged = spans_to_ged_labels(&spans, input.len());
    Ok(LabeledExample { input, y_sgt, y_gd, y_ged, spans })
}

/// Splice the gold fragments back together; for a coverable example this
/// reproduces the normalized reference.
pub fn gold_splice(example: &LabeledExample) -> String {
    let mut tokens: Vec<Token> = Vec::new();
    let mut spans = example.spans.clone();
    spans.sort_by_key(|s| s.order);
    for span in &spans {
        tokens.extend_from_slice(&example.input.tokens[span.range()]);
    }
    detokenize(&tokens)
}

/// One line of the label file. The assembled token list is stored as-is;
/// separator sentinels are recognizable by their `[SEP]` surface text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelRecord {
    pub tokens: Vec<Token>,
    pub speaker_track: Vec<Vec<f64>>,
    pub y_sgt: Vec<TagLabel>,
    pub y_gd: Vec<u8>,
    pub y_ged: Vec<u8>,
    pub spans: Vec<GlcsSpan>,
}

impl From<&LabeledExample> for LabelRecord {
    fn from(example: &LabeledExample) -> Self {
        LabelRecord {
            tokens: example.input.tokens.clone(),
            speaker_track: example.input.speaker_track.clone(),
            y_sgt: example.y_sgt.clone(),
            y_gd: example.y_gd.clone(),
            y_ged: example.y_ged.clone(),
            spans: example.spans.clone(),
        }
    }
}

impl From<LabelRecord> for LabeledExample {
    fn from(record: LabelRecord) -> Self {
        let separator_positions = record
            .tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| t.text == crate::corpus::SEPARATOR_TEXT && t.utterance_index == -1)
            .map(|(i, _)| i)
            .collect();
        LabeledExample {
            input: AssembledInput {
                tokens: record.tokens,
                speaker_track: record.speaker_track,
                separator_positions,
            },
            y_sgt: record.y_sgt,
            y_gd: record.y_gd,
            y_ged: record.y_ged,
            spans: record.spans,
        }
    }
}

/// Write examples as line-delimited JSON, one record per coverable dialogue.
pub fn write_label_file(examples: &[LabeledExample], path: &Path) -> Result<(), LabelError> {
    let mut file = File::create(path).map_err(crate::corpus::CorpusError::from)?;
    for example in examples {
        let record = LabelRecord::from(example);
        let line = serde_json::to_string(&record).expect("label record serializes");
        writeln!(file, "{line}").map_err(crate::corpus::CorpusError::from)?;
    }
    Ok(())
}

/// Read a label file written by [`write_label_file`].
pub fn read_label_file(path: &Path) -> Result<Vec<LabeledExample>, LabelError> {
    let file = File::open(path).map_err(crate::corpus::CorpusError::from)?;
    let mut examples = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(crate::corpus::CorpusError::from)?;
        if line.is_empty() {
            continue;
        }
        let record: LabelRecord = serde_json::from_str(&line)
            .map_err(|e| crate::corpus::CorpusError::IoFailure(std::io::Error::other(e)))?;
        examples.push(record.into());
    }
    Ok(examples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_dataset_line;
    use crate::text_units::tokenize;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    const WEATHER_LINE: &str =
        "深圳最近天气怎么样？\t最近经常阴天下雨。\t冬天就是这样的。\t深圳冬天就是经常阴天下雨。";

    fn weather_input() -> (AssembledInput, Dialogue) {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let input = assemble_input(&d, &[], 1).unwrap();
        (input, d)
    }

    #[test]
    fn prefix_match_finds_first_fragment() {
        let (input, _) = weather_input();
        let remainder = tokenize("深圳冬天就是经常阴天下雨");
        let u1 = &input.tokens[0..10];
        assert_eq!(longest_prefix_match(&remainder, u1), Some((0, 2)));
    }

    #[test]
    fn prefix_match_none_when_absent() {
        let remainder = tokenize("深圳");
        let region = tokenize("最近经常阴天下雨。");
        assert_eq!(longest_prefix_match(&remainder, &region), None);
    }

    #[test]
    fn prefix_match_prefers_rightmost_maximal() {
        // Region "a b a b x": prefix "a b" occurs at 0 and 2; rightmost wins.
        let remainder = tokenize("a b");
        let region = tokenize("a b a b x");
        assert_eq!(longest_prefix_match(&remainder, &region), Some((2, 2)));
    }

    /// Exhaustive oracle: enumerate every (position, length) pair.
    fn brute_force_match(remainder: &[Token], region: &[Token]) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for pos in 0..region.len() {
            for len in 1..=remainder.len().min(region.len() - pos) {
                let matches = (0..len).all(|i| region[pos + i].matches(&remainder[i]));
                if matches {
                    let better = match best {
                        None => true,
                        Some((b_pos, b_len)) => len > b_len || (len == b_len && pos > b_pos),
                    };
                    if better {
                        best = Some((pos, len));
                    }
                }
            }
        }
        best
    }

    fn random_tokens(rng: &mut ChaCha8Rng, alphabet: &[char], len: usize) -> Vec<Token> {
        let s: String = (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect();
        tokenize(&s)
    }

    #[test]
    fn prefix_match_agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let alphabet: Vec<char> = "啊吧次的".chars().collect();
        for _ in 0..300 {
            let remainder_len = rng.gen_range(1..=12);
            let region_len = rng.gen_range(0..=12);
            let remainder = random_tokens(&mut rng, &alphabet, remainder_len);
            let region = random_tokens(&mut rng, &alphabet, region_len);
            assert_eq!(
                longest_prefix_match(&remainder, &region),
                brute_force_match(&remainder, &region),
            );
        }
    }

    #[test]
    fn weather_reference_decomposes_into_three_fragments() {
        let (input, _) = weather_input();
        let reference = tokenize("深圳冬天就是经常阴天下雨");
        let spans = build_glcs_spans(&input, &reference, DEFAULT_TAG_CLASSES).unwrap();
        assert_eq!(
            spans,
            vec![
                GlcsSpan { order: 0, start: 0, length: 2, source_utterance: 0 },
                GlcsSpan { order: 1, start: 21, length: 4, source_utterance: 2 },
                GlcsSpan { order: 2, start: 13, length: 6, source_utterance: 1 },
            ]
        );
    }

    #[test]
    fn adjacent_terminal_punctuation_rides_with_its_fragment() {
        // "。" directly follows "经常阴天下雨" inside u2, so the greedy
        // match simply extends the third fragment to length 7.
        let (input, _) = weather_input();
        let reference = tokenize("深圳冬天就是经常阴天下雨。");
        let spans = build_glcs_spans(&input, &reference, DEFAULT_TAG_CLASSES).unwrap();
        assert_eq!(spans.len(), 3);
        assert_eq!(spans[2], GlcsSpan { order: 2, start: 13, length: 7, source_utterance: 1 });
    }

    #[test]
    fn detached_terminal_punctuation_becomes_its_own_fragment() {
        // "？" only occurs at the end of u1, away from the last fragment, so
        // it costs a fourth single-token fragment under the
        // punctuation-as-token policy.
        let (input, _) = weather_input();
        let reference = tokenize("深圳冬天就是经常阴天下雨？");
        let spans = build_glcs_spans(&input, &reference, DEFAULT_TAG_CLASSES).unwrap();
        assert_eq!(spans.len(), 4);
        assert_eq!(spans[3], GlcsSpan { order: 3, start: 9, length: 1, source_utterance: 0 });
    }

    #[test]
    fn identity_reference_is_one_fragment() {
        let d = parse_dataset_line("今天冬天就是这样\t冬天就是这样\t冬天就是这样").unwrap();
        let input = assemble_input(&d, &[], 1).unwrap();
        let reference = tokenize("冬天就是这样");
        let spans = build_glcs_spans(&input, &reference, DEFAULT_TAG_CLASSES).unwrap();
        assert_eq!(spans.len(), 1);
        // The reference also occurs inside u1; the later copy (the current
        // utterance itself, after the separator at 8) wins.
        assert_eq!(spans[0], GlcsSpan { order: 0, start: 9, length: 6, source_utterance: 1 });
    }

    #[test]
    fn missing_token_is_uncoverable() {
        let (input, _) = weather_input();
        let reference = tokenize("深圳蓝天");
        match build_glcs_spans(&input, &reference, DEFAULT_TAG_CLASSES) {
            Err(LabelError::Uncoverable { residue }) => {
                assert_eq!(residue[0].text, "蓝");
            }
            other => panic!("expected Uncoverable, got {other:?}"),
        }
    }

    #[test]
    fn order_budget_overflow_is_uncoverable() {
        // Alternating tokens force one fragment per reference token.
        let d = parse_dataset_line("甲乙丙丁\t甲丙乙丁").unwrap();
        let input = assemble_input(&d, &[], 1).unwrap();
        let reference = tokenize("甲丙乙丁");
        assert!(build_glcs_spans(&input, &reference, 3).is_err());
        assert!(build_glcs_spans(&input, &reference, 5).is_ok());
    }

    #[test]
    fn claimed_tokens_are_not_reusable() {
        // Reference needs "深" twice but it occurs once in the history.
        let d = parse_dataset_line("深圳\t深圳深").unwrap();
        let input = assemble_input(&d, &[], 1).unwrap();
        let reference = tokenize("深圳深");
        assert!(matches!(
            build_glcs_spans(&input, &reference, DEFAULT_TAG_CLASSES),
            Err(LabelError::Uncoverable { .. })
        ));
    }

    #[test]
    fn sgt_labels_mark_fragment_orders() {
        let (input, d) = weather_input();
        let example = build_labeled_example(
            &Dialogue { reference: Some("深圳冬天就是经常阴天下雨".into()), ..d },
            &LabelConfig::default(),
        )
        .unwrap();
        let rows: Vec<String> = example.y_sgt.iter().map(|t| t.to_string()).collect();
        // u1 occupies 0..10, u2 11..20, u3 21..29 (separators at 10 and 20).
        assert_eq!(rows[0], "I-A");
        assert_eq!(rows[1], "I-A");
        assert!(rows[2..10].iter().all(|r| r == "O"));
        assert_eq!(rows[10], "O"); // separator
        assert!(rows[13..19].iter().all(|r| r == "I-C"));
        assert!(rows[21..25].iter().all(|r| r == "I-B"));
        assert!(rows[25..29].iter().all(|r| r == "O"));
        assert_eq!(input.len(), rows.len());
    }

    #[test]
    fn empty_span_list_is_all_outside() {
        let labels = spans_to_sgt_labels(&[], 5, DEFAULT_TAG_CLASSES).unwrap();
        assert!(labels.iter().all(|t| *t == TagLabel::Outside));
        assert_eq!(spans_to_gd_labels(&[], 5), vec![0; 5]);
    }

    #[test]
    fn adjacent_spans_touch_without_outside_gap() {
        let spans = vec![
            GlcsSpan { order: 0, start: 0, length: 2, source_utterance: 0 },
            GlcsSpan { order: 1, start: 2, length: 3, source_utterance: 0 },
        ];
        let labels = spans_to_sgt_labels(&spans, 6, DEFAULT_TAG_CLASSES).unwrap();
        let rows: Vec<String> = labels.iter().map(|t| t.to_string()).collect();
        assert_eq!(rows, vec!["I-A", "I-A", "I-B", "I-B", "I-B", "O"]);
    }

    #[test]
    fn sgt_label_overflow_is_reported() {
        let spans = vec![GlcsSpan { order: 10, start: 0, length: 1, source_utterance: 0 }];
        assert!(matches!(
            spans_to_sgt_labels(&spans, 2, 11),
            Err(LabelError::OrderOverflow { order: 10, tag_classes: 11 })
        ));
    }

    #[test]
    fn ged_length_rules() {
        let at = |start, length| GlcsSpan { order: 0, start, length, source_utterance: 0 };
        assert_eq!(spans_to_ged_labels(&[at(0, 2)], 2), vec![1, 1]);
        assert_eq!(spans_to_ged_labels(&[at(0, 4)], 4), vec![1, 0, 0, 1]);
        assert_eq!(spans_to_ged_labels(&[at(0, 3)], 3), vec![1, 0, 1]);
        assert_eq!(spans_to_ged_labels(&[at(1, 1)], 3), vec![0, 1, 0]);
    }

    #[test]
    fn label_tracks_are_consistent_on_random_spans() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let len = rng.gen_range(1..40);
            let mut spans = Vec::new();
            let mut cursor = 0;
            let mut order = 0;
            while cursor < len && order < DEFAULT_TAG_CLASSES - 1 {
                let gap = rng.gen_range(0..3);
                cursor += gap;
                if cursor >= len {
                    break;
                }
                let length = rng.gen_range(1..=(len - cursor).min(5));
                if rng.gen_bool(0.8) {
                    spans.push(GlcsSpan { order, start: cursor, length, source_utterance: 0 });
                    order += 1;
                }
                cursor += length;
            }
            let y_sgt = spans_to_sgt_labels(&spans, len, DEFAULT_TAG_CLASSES).unwrap();
            let y_gd = spans_to_gd_labels(&spans, len);
            let y_ged = spans_to_ged_labels(&spans, len);
            for i in 0..len {
                assert_eq!(y_gd[i] == 1, y_sgt[i].is_inside(), "gd mismatch at {i}");
                if y_ged[i] == 1 {
                    assert_eq!(y_gd[i], 1, "edge outside a fragment at {i}");
                }
            }
        }
    }

    #[test]
    fn build_labeled_example_round_trips_reference() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let example = build_labeled_example(&d, &LabelConfig::default()).unwrap();
        assert_eq!(example.spans.len(), 3);
        assert_eq!(gold_splice(&example), "深圳冬天就是经常阴天下雨。");
    }

    #[test]
    fn identity_rewrite_marks_whole_current_utterance() {
        let d = parse_dataset_line("今天热\t就是这样\t就是这样").unwrap();
        let example = build_labeled_example(&d, &LabelConfig::default()).unwrap();
        assert_eq!(example.spans.len(), 1);
        // All of the current utterance (positions 4..8) is detected.
        assert_eq!(&example.y_gd[4..8], &[1, 1, 1, 1]);
        assert_eq!(example.y_gd.iter().map(|&b| b as usize).sum::<usize>(), 4);
    }

    #[test]
    fn missing_reference_is_an_error() {
        let d = Dialogue::from_texts(&["hello"], None);
        assert!(matches!(
            build_labeled_example(&d, &LabelConfig::default()),
            Err(LabelError::MissingReference)
        ));
    }

    #[test]
    fn tag_label_string_round_trip() {
        for (label, s) in [
            (TagLabel::Outside, "O"),
            (TagLabel::Inside(0), "I-A"),
            (TagLabel::Inside(9), "I-J"),
            (TagLabel::Inside(30), "I-30"),
        ] {
            assert_eq!(label.to_string(), s);
            assert_eq!(s.parse::<TagLabel>().unwrap(), label);
        }
        assert_eq!(TagLabel::Inside(2).class_index(), 3);
        assert_eq!(TagLabel::from_class_index(3), TagLabel::Inside(2));
    }

    #[test]
    fn label_file_round_trip() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let example = build_labeled_example(&d, &LabelConfig::default()).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        write_label_file(std::slice::from_ref(&example), file.path()).unwrap();
        let back = read_label_file(file.path()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0], example);
        assert_eq!(back[0].input.separator_positions, example.input.separator_positions);
    }
}
