//! Dialogue data model, dataset file ingestion and assembly of the model
//! input: connection-word prefix, history utterances joined by a separator
//! sentinel, and the per-token speaker indicator track.
//!
//! The canonical dataset format is one dialogue per line, UTF-8, fields
//! separated by tabs, last field the reference rewrite. Speakers alternate
//! A,B,A,… from the first utterance unless every utterance carries an
//! explicit `A:` / `B:` prefix.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::text_units::{tokenize, GranularityClass, Token};

/// Separator sentinel inserted between consecutive utterances. Never
/// produced by tokenization (brackets tokenize as single punctuation
/// scalars), so the surface text is unambiguous in label files.
pub const SEPARATOR_TEXT: &str = "[SEP]";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed line: expected at least 2 tab-separated fields, found {found}")]
    MalformedLine { found: usize },
    #[error("empty field at index {index}")]
    EmptyField { index: usize },
    #[error("dialogue has no utterances")]
    EmptyDialogue,
    #[error("speaker width must be at least 1")]
    BadSpeakerWidth,
    #[error("corpus file is not valid UTF-8")]
    EncodingFailure,
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

/// One history utterance with its tokens and speaker id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub tokens: Vec<Token>,
    pub speaker: u32,
    pub raw_text: String,
}

impl Utterance {
    pub fn new(raw_text: impl Into<String>, speaker: u32, utterance_index: i32) -> Self {
        let raw_text = raw_text.into();
        let mut tokens = tokenize(&raw_text);
        for token in &mut tokens {
            token.utterance_index = utterance_index;
            token.speaker = speaker;
        }
        Utterance { tokens, speaker, raw_text }
    }
}

/// A dialogue: history utterances (the last one is the utterance to rewrite)
/// plus the reference rewrite when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dialogue {
    pub utterances: Vec<Utterance>,
    pub reference: Option<String>,
}

impl Dialogue {
    /// Build from raw utterance texts with alternating speakers 0,1,0,…
    pub fn from_texts<S: AsRef<str>>(texts: &[S], reference: Option<String>) -> Self {
        let utterances = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Utterance::new(t.as_ref(), (i % 2) as u32, i as i32))
            .collect();
        Dialogue { utterances, reference }
    }

    /// The utterance to be rewritten (the last one).
    pub fn current(&self) -> &Utterance {
        self.utterances.last().expect("dialogue has at least one utterance")
    }

    /// Utterances before the current one.
    pub fn context(&self) -> &[Utterance] {
        &self.utterances[..self.utterances.len() - 1]
    }

    /// Canonical one-line dataset form: tab-joined utterances then reference.
    pub fn to_dataset_line(&self) -> String {
        let mut fields: Vec<&str> = self.utterances.iter().map(|u| u.raw_text.as_str()).collect();
        if let Some(ref r) = self.reference {
            fields.push(r);
        }
        fields.join("\t")
    }
}

/// Parse one dataset line: all fields but the last are utterances, the last
/// is the reference rewrite.
pub fn parse_dataset_line(line: &str) -> Result<Dialogue, CorpusError> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() < 2 {
        return Err(CorpusError::MalformedLine { found: fields.len() });
    }
    if let Some(index) = fields.iter().position(|f| f.trim().is_empty()) {
        return Err(CorpusError::EmptyField { index });
    }
    let (reference, utterances) = fields.split_last().expect("len >= 2");

    // Explicit speakers only when every utterance is prefixed; otherwise the
    // prefixes are treated as ordinary text and speakers alternate.
    let explicit = utterances.iter().all(|f| f.starts_with("A:") || f.starts_with("B:"));
    let utterances = utterances
        .iter()
        .enumerate()
        .map(|(i, field)| {
            if explicit {
                let speaker = if field.starts_with("A:") { 0 } else { 1 };
                Utterance::new(field[2..].trim_start(), speaker, i as i32)
            } else {
                Utterance::new(*field, (i % 2) as u32, i as i32)
            }
        })
        .collect();
    Ok(Dialogue { utterances, reference: Some(reference.to_string()) })
}

/// A loaded corpus: dialogues in file order plus the skip count for
/// malformed lines.
#[derive(Debug)]
pub struct CorpusLoad {
    pub dialogues: Vec<Dialogue>,
    pub total_lines: usize,
    pub skipped: usize,
}

/// Read a dataset file: UTF-8, one dialogue per line, NFC-normalized on
/// ingestion. Malformed lines are skipped and counted, not fatal.
pub fn load_corpus(path: &Path) -> Result<CorpusLoad, CorpusError> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| CorpusError::EncodingFailure)?;

    let mut load = CorpusLoad { dialogues: Vec::new(), total_lines: 0, skipped: 0 };
    for (number, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        load.total_lines += 1;
        let line: String = line.nfc().collect();
        match parse_dataset_line(&line) {
            Ok(dialogue) => load.dialogues.push(dialogue),
            Err(err) => {
                log::warn!("skipping line {}: {err}", number + 1);
                load.skipped += 1;
            }
        }
    }
    Ok(load)
}

/// Read a connection-word file: one entry per line, `#` starts a comment.
pub fn load_connection_words(path: &Path) -> Result<Vec<String>, CorpusError> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| CorpusError::EncodingFailure)?;
    Ok(text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.nfc().collect())
        .collect())
}

/// A contiguous block of matchable tokens in the assembled input: the
/// connection-word prefix (`source_utterance == -1`) or one utterance.
/// Separators belong to no region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub source_utterance: i32,
    pub start: usize,
    pub len: usize,
}

impl Region {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// The concatenated model input: connection words, then utterances joined
/// by separator sentinels, with a speaker indicator row per token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembledInput {
    pub tokens: Vec<Token>,
    /// One indicator row of `speaker_width` values per token. Width 1
    /// encodes speaker s as s mod 2; separators and connection words carry
    /// the speaker-0 indicator.
    pub speaker_track: Vec<Vec<f64>>,
    pub separator_positions: BTreeSet<usize>,
}

impl AssembledInput {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_separator(&self, index: usize) -> bool {
        self.separator_positions.contains(&index)
    }

    pub fn speaker_width(&self) -> usize {
        self.speaker_track.first().map_or(1, Vec::len)
    }

    /// Matchable regions in input order.
    pub fn regions(&self) -> Vec<Region> {
        let mut regions: Vec<Region> = Vec::new();
        for (i, token) in self.tokens.iter().enumerate() {
            if self.is_separator(i) {
                continue;
            }
            match regions.last_mut() {
                Some(r) if r.source_utterance == token.utterance_index && r.start + r.len == i => {
                    r.len += 1
                }
                _ => regions.push(Region { source_utterance: token.utterance_index, start: i, len: 1 }),
            }
        }
        regions
    }
}

fn speaker_indicator(speaker: u32, width: usize) -> Vec<f64> {
    if width == 1 {
        vec![f64::from(speaker % 2)]
    } else {
        let mut row = vec![0.0; width];
        row[speaker as usize % width] = 1.0;
        row
    }
}

/// Assemble a dialogue into the model input sequence: tokenized connection
/// words (utterance index -1), then U_1 [SEP] U_2 [SEP] … U_n.
pub fn assemble_input(
    dialogue: &Dialogue,
    connection_words: &[String],
    speaker_width: usize,
) -> Result<AssembledInput, CorpusError> {
    if dialogue.utterances.is_empty() {
        return Err(CorpusError::EmptyDialogue);
    }
    if speaker_width == 0 {
        return Err(CorpusError::BadSpeakerWidth);
    }

    let mut input = AssembledInput {
        tokens: Vec::new(),
        speaker_track: Vec::new(),
        separator_positions: BTreeSet::new(),
    };

    let mut prefix_position = 0;
    for word in connection_words {
        for mut token in tokenize(word) {
            token.utterance_index = -1;
            token.position_in_utterance = prefix_position;
            token.speaker = 0;
            prefix_position += 1;
            input.tokens.push(token);
            input.speaker_track.push(speaker_indicator(0, speaker_width));
        }
    }

    for (i, utterance) in dialogue.utterances.iter().enumerate() {
        if i > 0 {
            input.separator_positions.insert(input.tokens.len());
            input.tokens.push(Token {
                text: SEPARATOR_TEXT.to_string(),
                granularity: GranularityClass::Punct,
                utterance_index: -1,
                position_in_utterance: 0,
                speaker: 0,
            });
            input.speaker_track.push(speaker_indicator(0, speaker_width));
        }
        for token in &utterance.tokens {
            let mut token = token.clone();
            token.utterance_index = i as i32;
            token.speaker = utterance.speaker;
            input.tokens.push(token);
            input.speaker_track.push(speaker_indicator(utterance.speaker, speaker_width));
        }
    }
    Ok(input)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    pub(crate) const WEATHER_LINE: &str =
        "深圳最近天气怎么样？\t最近经常阴天下雨。\t冬天就是这样的。\t深圳冬天就是经常阴天下雨。";

    #[test]
    fn parse_line_splits_utterances_and_reference() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        assert_eq!(d.utterances.len(), 3);
        assert_eq!(d.reference.as_deref(), Some("深圳冬天就是经常阴天下雨。"));
        assert_eq!(d.utterances[0].speaker, 0);
        assert_eq!(d.utterances[1].speaker, 1);
        assert_eq!(d.utterances[2].speaker, 0);
        assert_eq!(d.utterances[0].tokens.len(), 10);
    }

    #[test]
    fn parse_minimal_two_field_line() {
        let d = parse_dataset_line("hi\thi").unwrap();
        assert_eq!(d.utterances.len(), 1);
        assert_eq!(d.reference.as_deref(), Some("hi"));
    }

    #[test]
    fn parse_rejects_single_field() {
        assert!(matches!(
            parse_dataset_line("深圳"),
            Err(CorpusError::MalformedLine { found: 1 })
        ));
    }

    #[test]
    fn parse_rejects_empty_field() {
        assert!(matches!(
            parse_dataset_line("hi\t\tok"),
            Err(CorpusError::EmptyField { index: 1 })
        ));
    }

    #[test]
    fn explicit_speaker_prefixes_override_alternation() {
        let d = parse_dataset_line("A: hello\tA: again\tB: hi\thello again").unwrap();
        assert_eq!(d.utterances.iter().map(|u| u.speaker).collect::<Vec<_>>(), vec![0, 0, 1]);
        assert_eq!(d.utterances[0].raw_text, "hello");
        // A mixed line keeps the prefixes as text and alternates.
        let d = parse_dataset_line("A: hello\thi\tok").unwrap();
        assert_eq!(d.utterances[0].raw_text, "A: hello");
        assert_eq!(d.utterances[1].speaker, 1);
    }

    #[test]
    fn load_counts_and_skips_malformed_lines() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "hi\thello").unwrap();
        writeln!(file, "no-tabs-here").unwrap();
        writeln!(file, "a\tb\tc").unwrap();
        writeln!(file, "x\ty").unwrap();
        let load = load_corpus(file.path()).unwrap();
        assert_eq!(load.total_lines, 4);
        assert_eq!(load.dialogues.len(), 3);
        assert_eq!(load.skipped, 1);
    }

    #[test]
    fn load_empty_file_yields_empty_corpus() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let load = load_corpus(file.path()).unwrap();
        assert!(load.dialogues.is_empty());
        assert_eq!(load.skipped, 0);
    }

    #[test]
    fn load_applies_nfc() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        // "é" as e + combining acute, twice.
        writeln!(file, "cafe\u{301}\tcafe\u{301}").unwrap();
        let load = load_corpus(file.path()).unwrap();
        assert_eq!(load.dialogues[0].utterances[0].raw_text, "café");
    }

    #[test]
    fn connection_word_file_skips_comments() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# function words").unwrap();
        writeln!(file, "的").unwrap();
        writeln!(file).unwrap();
        writeln!(file, "和").unwrap();
        let words = load_connection_words(file.path()).unwrap();
        assert_eq!(words, vec!["的", "和"]);
    }

    #[test]
    fn assemble_weather_dialogue() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let input = assemble_input(&d, &[], 1).unwrap();
        // 10 + sep + 9 + sep + 8
        assert_eq!(input.len(), 29);
        assert_eq!(input.separator_positions.iter().copied().collect::<Vec<_>>(), vec![10, 20]);
        assert_eq!(input.tokens[10].text, SEPARATOR_TEXT);
        // Speaker indicators: 0 for u1/u3 and sentinels, 1 for u2.
        for i in 0..29 {
            let expect = if (11..20).contains(&i) { 1.0 } else { 0.0 };
            assert_eq!(input.speaker_track[i], vec![expect], "token {i}");
        }
        let regions = input.regions();
        assert_eq!(regions.len(), 3);
        assert_eq!(regions[1], Region { source_utterance: 1, start: 11, len: 9 });
    }

    #[test]
    fn assemble_single_utterance_has_no_separator() {
        let d = Dialogue::from_texts(&["hello there"], None);
        let input = assemble_input(&d, &[], 1).unwrap();
        assert_eq!(input.len(), 2);
        assert!(input.separator_positions.is_empty());
    }

    #[test]
    fn assemble_prepends_connection_words() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let words = vec!["的".to_string(), "和".to_string()];
        let input = assemble_input(&d, &words, 1).unwrap();
        assert_eq!(input.len(), 31);
        assert_eq!(input.tokens[0].text, "的");
        assert_eq!(input.tokens[0].utterance_index, -1);
        assert_eq!(input.tokens[1].utterance_index, -1);
        assert_eq!(input.tokens[1].position_in_utterance, 1);
        assert_eq!(input.regions()[0], Region { source_utterance: -1, start: 0, len: 2 });

        // Position bookkeeping: every non-sentinel token maps back to its
        // source (utterance_index, position) pair, bijectively.
        let mut seen = std::collections::BTreeSet::new();
        for (i, token) in input.tokens.iter().enumerate() {
            if input.is_separator(i) {
                continue;
            }
            let key = (token.utterance_index, token.position_in_utterance);
            assert!(seen.insert(key), "duplicate source position {key:?}");
            if token.utterance_index >= 0 {
                let source = &d.utterances[token.utterance_index as usize];
                assert_eq!(source.tokens[token.position_in_utterance].text, token.text);
            }
        }
        let expected = 2 + d.utterances.iter().map(|u| u.tokens.len()).sum::<usize>();
        assert_eq!(seen.len(), expected);
    }

    #[test]
    fn assembly_is_deterministic() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let a = assemble_input(&d, &[], 1).unwrap();
        let b = assemble_input(&d, &[], 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wide_speaker_track_is_one_hot() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let input = assemble_input(&d, &[], 2).unwrap();
        assert_eq!(input.speaker_track[0], vec![1.0, 0.0]);
        assert_eq!(input.speaker_track[11], vec![0.0, 1.0]);
        assert_eq!(input.speaker_track[10], vec![1.0, 0.0]); // separator = speaker 0
    }

    #[test]
    fn assemble_rejects_empty_dialogue() {
        let d = Dialogue { utterances: vec![], reference: None };
        assert!(matches!(assemble_input(&d, &[], 1), Err(CorpusError::EmptyDialogue)));
    }
}
