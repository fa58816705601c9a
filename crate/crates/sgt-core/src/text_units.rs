//! Mixed-granularity tokenization: single characters for CJK scripts, whole
//! words for Latin-script runs and digit runs, single scalars for punctuation.
//!
//! Whitespace is a separator only and never becomes a token. [`detokenize`]
//! reinserts a single space exactly between two word-or-number tokens, so
//! `tokenize(detokenize(t)) == t` for any token list `t` that `tokenize`
//! produced.

use serde::{Deserialize, Serialize};

/// Class of a token, decided scalar by scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GranularityClass {
    /// One CJK scalar (Han ideographs, kana, hangul).
    CjkChar,
    /// A maximal run of non-CJK letters.
    Word,
    /// A maximal run of digits.
    Number,
    /// A single non-alphanumeric, non-whitespace scalar.
    Punct,
}

impl GranularityClass {
    /// Word and Number tokens are joined by a space when adjacent.
    pub fn spaced(self) -> bool {
        matches!(self, GranularityClass::Word | GranularityClass::Number)
    }
}

/// Atomic text unit of an assembled model input.
///
/// `utterance_index` is -1 for connection-word prefix tokens and for the
/// separator sentinel; history utterances count from 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub granularity: GranularityClass,
    pub utterance_index: i32,
    pub position_in_utterance: usize,
    pub speaker: u32,
}

impl Token {
    pub fn new(text: impl Into<String>, granularity: GranularityClass) -> Self {
        Token {
            text: text.into(),
            granularity,
            utterance_index: 0,
            position_in_utterance: 0,
            speaker: 0,
        }
    }

    /// Equality used in fragment matching: same surface text in the same
    /// granularity class, regardless of where the token sits.
    pub fn matches(&self, other: &Token) -> bool {
        self.granularity == other.granularity && self.text == other.text
    }
}

/// Classify one Unicode scalar. Whitespace yields `None`; everything else
/// maps to exactly one class.
pub fn classify_scalar(c: char) -> Option<GranularityClass> {
    if c.is_whitespace() {
        return None;
    }
    if is_cjk_scalar(c) {
        return Some(GranularityClass::CjkChar);
    }
    if c.is_alphabetic() {
        return Some(GranularityClass::Word);
    }
    if c.is_numeric() {
        return Some(GranularityClass::Number);
    }
    Some(GranularityClass::Punct)
}

/// CJK detection: Han ideograph blocks plus extensions, kana and hangul.
/// Datasets of interest are Chinese/English; kana/hangul are folded in so
/// the char-level rule generalizes to neighboring scripts.
fn is_cjk_scalar(c: char) -> bool {
    matches!(u32::from(c),
        0x4E00..=0x9FFF      // CJK Unified Ideographs
        | 0x3400..=0x4DBF    // Extension A
        | 0x20000..=0x2FA1F  // Extensions B..F + compatibility supplement
        | 0x30000..=0x3134F  // Extensions G/H
        | 0xF900..=0xFAFF    // CJK Compatibility Ideographs
        | 0x3040..=0x309F    // Hiragana
        | 0x30A0..=0x30FF    // Katakana
        | 0x31F0..=0x31FF    // Katakana Phonetic Extensions
        | 0x1100..=0x11FF    // Hangul Jamo
        | 0x3130..=0x318F    // Hangul Compatibility Jamo
        | 0xAC00..=0xD7A3    // Hangul Syllables
    )
}

/// Split text into tokens. CJK scalars and punctuation become single-scalar
/// tokens; maximal letter runs and digit runs become one token each.
///
/// `position_in_utterance` is filled with the token's index in this text;
/// `utterance_index` and `speaker` are left at 0 for the caller to assign.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens: Vec<Token> = Vec::new();
    let mut run: Option<(String, GranularityClass)> = None;

    let flush = |run: &mut Option<(String, GranularityClass)>, tokens: &mut Vec<Token>| {
        if let Some((text, class)) = run.take() {
            tokens.push(Token::new(text, class));
        }
    };

    for c in text.chars() {
        match classify_scalar(c) {
            None => flush(&mut run, &mut tokens),
            Some(class @ (GranularityClass::CjkChar | GranularityClass::Punct)) => {
                flush(&mut run, &mut tokens);
                tokens.push(Token::new(c.to_string(), class));
            }
            Some(class) => match run {
                Some((ref mut text, current)) if current == class => text.push(c),
                _ => {
                    flush(&mut run, &mut tokens);
                    run = Some((c.to_string(), class));
                }
            },
        }
    }
    flush(&mut run, &mut tokens);

    for (i, token) in tokens.iter_mut().enumerate() {
        token.position_in_utterance = i;
    }
    tokens
}

/// Render tokens back to text. A single space joins two adjacent tokens iff
/// both are Word or Number granularity; all other boundaries join directly.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_spaced = false;
    for token in tokens {
        let spaced = token.granularity.spaced();
        if prev_spaced && spaced {
            out.push(' ');
        }
        out.push_str(&token.text);
        prev_spaced = spaced;
    }
    out
}

/// Canonical surface form: tokenize then detokenize. Collapses whitespace
/// runs to the single-space convention.
pub fn normalize_text(text: &str) -> String {
    detokenize(&tokenize(text))
}
