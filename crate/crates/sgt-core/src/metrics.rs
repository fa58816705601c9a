//! Corpus-level evaluation: cumulative n-gram BLEU, ROUGE-n / ROUGE-L,
//! exact match, and restoration precision/recall/F over n-grams that touch
//! at least one word restored from the dialogue context.
//!
//! All text is tokenized with the mixed-granularity rules of
//! [`crate::text_units`], so "word" means a CJK character or a Latin
//! word/number token. Scores live in [0, 1].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::Dialogue;
use crate::text_units::{tokenize, Token};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("prediction/reference length mismatch or empty corpus: {predictions} vs {references}")]
    LengthMismatch { predictions: usize, references: usize },
    #[error("dialogue {index} has no reference rewrite")]
    MissingReference { index: usize },
}

/// Multiset of n-grams over token texts.
#[derive(Debug, Clone)]
pub struct NGramMultiset {
    counts: HashMap<Vec<String>, usize>,
    n: usize,
}

impl NGramMultiset {
    pub fn from_tokens(tokens: &[Token], n: usize) -> Self {
        assert!(n >= 1);
        let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
        if tokens.len() >= n {
            for window in tokens.windows(n) {
                let gram: Vec<String> = window.iter().map(|t| t.text.clone()).collect();
                *counts.entry(gram).or_insert(0) += 1;
            }
        }
        NGramMultiset { counts, n }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    /// Total gram count including multiplicity.
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    /// Clipped multiset intersection size: sum over grams of
    /// min(count here, count there).
    pub fn clipped_overlap(&self, other: &NGramMultiset) -> usize {
        self.counts
            .iter()
            .map(|(gram, &count)| count.min(other.counts.get(gram).copied().unwrap_or(0)))
            .sum()
    }

    /// Keep only grams accepted by the predicate.
    pub fn retain<F: Fn(&[String]) -> bool>(mut self, keep: F) -> Self {
        self.counts.retain(|gram, _| keep(gram));
        self
    }
}

fn nfc(text: &str) -> String {
    text.nfc().collect()
}

fn check_lengths(predictions: usize, references: usize) -> Result<(), MetricsError> {
    if predictions != references || predictions == 0 {
        return Err(MetricsError::LengthMismatch { predictions, references });
    }
    Ok(())
}

/// Corpus-level cumulative BLEU of order `n`: geometric mean of clipped
/// modified precisions for orders 1..=n times the brevity penalty. Any
/// zero-precision order zeroes the score (no smoothing).
pub fn bleu_n(predictions: &[String], references: &[String], n: usize) -> Result<f64, MetricsError> {
    check_lengths(predictions.len(), references.len())?;
    let mut matched = vec![0usize; n];
    let mut total = vec![0usize; n];
    let mut pred_len = 0usize;
    let mut ref_len = 0usize;

    for (prediction, reference) in predictions.iter().zip(references) {
        let p = tokenize(&nfc(prediction));
        let r = tokenize(&nfc(reference));
        pred_len += p.len();
        ref_len += r.len();
        for order in 1..=n {
            let pg = NGramMultiset::from_tokens(&p, order);
            let rg = NGramMultiset::from_tokens(&r, order);
            matched[order - 1] += pg.clipped_overlap(&rg);
            total[order - 1] += pg.total();
        }
    }

    if pred_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    for order in 0..n {
        if matched[order] == 0 || total[order] == 0 {
            return Ok(0.0);
        }
        log_sum += (matched[order] as f64 / total[order] as f64).ln();
    }
    let brevity = (1.0 - ref_len as f64 / pred_len as f64).min(0.0).exp();
    Ok(brevity * (log_sum / n as f64).exp())
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// ROUGE-n: per-example F1 of clipped n-gram overlap, macro-averaged.
pub fn rouge_n(predictions: &[String], references: &[String], n: usize) -> Result<f64, MetricsError> {
    check_lengths(predictions.len(), references.len())?;
    let mut sum = 0.0;
    for (prediction, reference) in predictions.iter().zip(references) {
        let pg = NGramMultiset::from_tokens(&tokenize(&nfc(prediction)), n);
        let rg = NGramMultiset::from_tokens(&tokenize(&nfc(reference)), n);
        let overlap = pg.clipped_overlap(&rg) as f64;
        let precision = if pg.total() == 0 { 0.0 } else { overlap / pg.total() as f64 };
        let recall = if rg.total() == 0 { 0.0 } else { overlap / rg.total() as f64 };
        sum += f1(precision, recall);
    }
    Ok(sum / predictions.len() as f64)
}

/// Length of the longest common subsequence (not necessarily contiguous).
fn lcs_len(a: &[Token], b: &[Token]) -> usize {
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            table[i][j] = if a[i - 1].matches(&b[j - 1]) {
                table[i - 1][j - 1] + 1
            } else {
                table[i - 1][j].max(table[i][j - 1])
            };
        }
    }
    table[a.len()][b.len()]
}

/// ROUGE-L: per-example F1 of the longest common subsequence length,
/// macro-averaged.
pub fn rouge_l(predictions: &[String], references: &[String]) -> Result<f64, MetricsError> {
    check_lengths(predictions.len(), references.len())?;
    let mut sum = 0.0;
    for (prediction, reference) in predictions.iter().zip(references) {
        let p = tokenize(&nfc(prediction));
        let r = tokenize(&nfc(reference));
        let lcs = lcs_len(&p, &r) as f64;
        let precision = if p.is_empty() { 0.0 } else { lcs / p.len() as f64 };
        let recall = if r.is_empty() { 0.0 } else { lcs / r.len() as f64 };
        sum += f1(precision, recall);
    }
    Ok(sum / predictions.len() as f64)
}

/// Fraction of NFC-normalized exact string matches.
pub fn exact_match(predictions: &[String], references: &[String]) -> Result<f64, MetricsError> {
    check_lengths(predictions.len(), references.len())?;
    let hits = predictions
        .iter()
        .zip(references)
        .filter(|(p, r)| nfc(p) == nfc(r))
        .count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// Token texts that occur in some context utterance but not in the current
/// utterance: the words a rewrite has to restore from context.
pub fn restored_word_set(context: &[&[Token]], current: &[Token]) -> BTreeSet<String> {
    let current: BTreeSet<&str> = current.iter().map(|t| t.text.as_str()).collect();
    let mut restored = BTreeSet::new();
    for utterance in context {
        for token in *utterance {
            if !current.contains(token.text.as_str()) {
                restored.insert(token.text.clone());
            }
        }
    }
    restored
}

/// Precision / recall / F over one restoration order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct PrfScores {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
}

/// Micro-average accumulator for restoration scores.
#[derive(Debug, Default, Clone, Copy)]
pub struct RestorationTally {
    pub matched: usize,
    pub predicted: usize,
    pub referenced: usize,
}

impl RestorationTally {
    pub fn add(&mut self, prediction: &[Token], reference: &[Token], restored: &BTreeSet<String>, n: usize) {
        let keep = |gram: &[String]| gram.iter().any(|g| restored.contains(g));
        let pg = NGramMultiset::from_tokens(prediction, n).retain(keep);
        let rg = NGramMultiset::from_tokens(reference, n).retain(keep);
        self.matched += pg.clipped_overlap(&rg);
        self.predicted += pg.total();
        self.referenced += rg.total();
    }

    pub fn scores(&self) -> PrfScores {
        let precision =
            if self.predicted == 0 { 0.0 } else { self.matched as f64 / self.predicted as f64 };
        let recall =
            if self.referenced == 0 { 0.0 } else { self.matched as f64 / self.referenced as f64 };
        PrfScores { precision, recall, f_score: f1(precision, recall) }
    }
}

/// Restoration P/R/F for a single example: n-grams of prediction and
/// reference that contain at least one restored word, compared with clipped
/// multiset intersection.
pub fn restoration_prf(
    prediction: &str,
    reference: &str,
    context: &[&[Token]],
    current: &[Token],
    n: usize,
) -> PrfScores {
    let restored = restored_word_set(context, current);
    let mut tally = RestorationTally::default();
    tally.add(&tokenize(&nfc(prediction)), &tokenize(&nfc(reference)), &restored, n);
    tally.scores()
}

/// The full corpus report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub corpus_size: usize,
    /// Cumulative BLEU by order (1, 2, 4).
    pub bleu: BTreeMap<usize, f64>,
    /// ROUGE scores keyed "1", "2", "L".
    pub rouge: BTreeMap<String, f64>,
    pub em: f64,
    /// Micro-averaged restoration scores by order (1, 2, 3).
    pub restoration: BTreeMap<usize, PrfScores>,
}

impl MetricReport {
    /// Fixed-width human-readable table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("corpus size: {}\n\n", self.corpus_size));
        out.push_str("metric              score\n");
        out.push_str("------------------  ------\n");
        for (n, prf) in &self.restoration {
            out.push_str(&format!("restoration P{n}      {:.4}\n", prf.precision));
            out.push_str(&format!("restoration R{n}      {:.4}\n", prf.recall));
            out.push_str(&format!("restoration F{n}      {:.4}\n", prf.f_score));
        }
        for (n, score) in &self.bleu {
            out.push_str(&format!("BLEU-{n}              {score:.4}\n"));
        }
        for (name, score) in &self.rouge {
            out.push_str(&format!("ROUGE-{name:<2}            {score:.4}\n"));
        }
        out.push_str(&format!("exact match         {:.4}\n", self.em));
        out
    }
}

/// Score predictions against the dialogues' references with every metric.
pub fn evaluate_corpus(
    predictions: &[String],
    dialogues: &[Dialogue],
) -> Result<MetricReport, MetricsError> {
    check_lengths(predictions.len(), dialogues.len())?;
    let mut references = Vec::with_capacity(dialogues.len());
    for (index, dialogue) in dialogues.iter().enumerate() {
        let reference =
            dialogue.reference.clone().ok_or(MetricsError::MissingReference { index })?;
        references.push(reference);
    }

    let mut bleu = BTreeMap::new();
    for n in [1, 2, 4] {
        bleu.insert(n, bleu_n(predictions, &references, n)?);
    }
    let mut rouge = BTreeMap::new();
    rouge.insert("1".to_string(), rouge_n(predictions, &references, 1)?);
    rouge.insert("2".to_string(), rouge_n(predictions, &references, 2)?);
    rouge.insert("L".to_string(), rouge_l(predictions, &references)?);
    let em = exact_match(predictions, &references)?;

    let mut restoration = BTreeMap::new();
    for n in [1, 2, 3] {
        let mut tally = RestorationTally::default();
        for ((prediction, reference), dialogue) in
            predictions.iter().zip(&references).zip(dialogues)
        {
            let context: Vec<&[Token]> =
                dialogue.context().iter().map(|u| u.tokens.as_slice()).collect();
            let restored = restored_word_set(&context, &dialogue.current().tokens);
            tally.add(&tokenize(&nfc(prediction)), &tokenize(&nfc(reference)), &restored, n);
        }
        restoration.insert(n, tally.scores());
    }

    Ok(MetricReport { corpus_size: predictions.len(), bleu, rouge, em, restoration })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_dataset_line;

    const WEATHER_LINE: &str =
        "深圳最近天气怎么样？\t最近经常阴天下雨。\t冬天就是这样的。\t深圳冬天就是经常阴天下雨。";

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identity_bleu_is_one() {
        let texts = strings(&["深圳冬天就是经常阴天下雨", "how are you today"]);
        for n in [1, 2, 4] {
            assert_eq!(bleu_n(&texts, &texts, n).unwrap(), 1.0);
        }
    }

    #[test]
    fn brevity_penalty_case() {
        // 10-token prediction against a 12-token reference, perfect unigram
        // precision: BLEU-1 = exp(1 - 12/10).
        let predictions = strings(&["冬天就是经常阴天下雨"]);
        let references = strings(&["深圳冬天就是经常阴天下雨"]);
        let got = bleu_n(&predictions, &references, 1).unwrap();
        let want = (1.0f64 - 12.0 / 10.0).exp();
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        assert!((got - 0.8187).abs() < 1e-4);
    }

    #[test]
    fn disjoint_bleu_is_zero() {
        let predictions = strings(&["深圳"]);
        let references = strings(&["今天"]);
        assert_eq!(bleu_n(&predictions, &references, 1).unwrap(), 0.0);
        assert_eq!(bleu_n(&predictions, &references, 2).unwrap(), 0.0);
    }

    #[test]
    fn bleu_clips_repeated_words() {
        // "深深深" vs "深圳": only min(3, 1) = 1 unigram counts.
        let predictions = strings(&["深深深"]);
        let references = strings(&["深圳"]);
        let got = bleu_n(&predictions, &references, 1).unwrap();
        // p1 = 1/3, brevity = exp(1 - 2/3) > 1 clamped to 1.
        assert!((got - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bleu_rejects_mismatched_lengths() {
        let predictions = strings(&["a"]);
        assert!(matches!(
            bleu_n(&predictions, &[], 1),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert!(bleu_n(&[], &[], 1).is_err());
    }

    #[test]
    fn rouge_identity_and_disjoint() {
        let texts = strings(&["深圳冬天", "hello world"]);
        assert_eq!(rouge_n(&texts, &texts, 1).unwrap(), 1.0);
        assert_eq!(rouge_n(&texts, &texts, 2).unwrap(), 1.0);
        assert_eq!(rouge_l(&texts, &texts).unwrap(), 1.0);
        let other = strings(&["晴空大海", "good bye now"]);
        assert_eq!(rouge_n(&texts, &other, 1).unwrap(), 0.0);
        assert_eq!(rouge_l(&texts, &other).unwrap(), 0.0);
    }

    #[test]
    fn rouge_order_sensitivity() {
        // Prediction "a b" vs reference "b a": unigram overlap is total but
        // the longest common subsequence is a single token.
        let predictions = strings(&["a b"]);
        let references = strings(&["b a"]);
        assert_eq!(rouge_n(&predictions, &references, 1).unwrap(), 1.0);
        let rl = rouge_l(&predictions, &references).unwrap();
        assert!((rl - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_match_fractions() {
        let references = strings(&["a", "b", "c", "d"]);
        assert_eq!(exact_match(&references, &references).unwrap(), 1.0);
        let none = strings(&["w", "x", "y", "z"]);
        assert_eq!(exact_match(&none, &references).unwrap(), 0.0);
        let one = strings(&["a", "x", "y", "z"]);
        assert_eq!(exact_match(&one, &references).unwrap(), 0.25);
        // NFC-normalized comparison.
        let composed = strings(&["café"]);
        let decomposed = strings(&["cafe\u{301}"]);
        assert_eq!(exact_match(&composed, &decomposed).unwrap(), 1.0);
    }

    #[test]
    fn restored_words_are_context_minus_current() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let context: Vec<&[Token]> = d.context().iter().map(|u| u.tokens.as_slice()).collect();
        let restored = restored_word_set(&context, &d.current().tokens);
        let expected: BTreeSet<String> = ["深", "圳", "最", "近", "气", "怎", "么", "？", "经", "常", "阴", "下", "雨"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(restored, expected);
    }

    #[test]
    fn restored_set_empty_when_context_is_covered_or_absent() {
        let d = parse_dataset_line("深圳\t深圳\tok").unwrap();
        let context: Vec<&[Token]> = d.context().iter().map(|u| u.tokens.as_slice()).collect();
        assert!(restored_word_set(&context, &d.current().tokens).is_empty());
        assert!(restored_word_set(&[], &d.current().tokens).is_empty());
    }

    #[test]
    fn restoration_prf_weather_case() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let context: Vec<&[Token]> = d.context().iter().map(|u| u.tokens.as_slice()).collect();
        let current = &d.current().tokens;

        let identical = restoration_prf(
            "深圳冬天就是经常阴天下雨",
            "深圳冬天就是经常阴天下雨",
            &context,
            current,
            1,
        );
        assert_eq!((identical.precision, identical.recall, identical.f_score), (1.0, 1.0, 1.0));

        // Prediction dropping the subject: restored unigrams are
        // {经,常,阴,下,雨} in the prediction and {深,圳,经,常,阴,下,雨} in
        // the reference.
        let dropped = restoration_prf(
            "冬天就是经常阴天下雨",
            "深圳冬天就是经常阴天下雨",
            &context,
            current,
            1,
        );
        assert!((dropped.precision - 1.0).abs() < 1e-12);
        assert!((dropped.recall - 5.0 / 7.0).abs() < 1e-12);
        assert!((dropped.f_score - 5.0 / 6.0).abs() < 1e-12);

        let none = restoration_prf("冬天就是", "深圳冬天就是经常阴天下雨", &context, current, 1);
        assert_eq!((none.precision, none.recall, none.f_score), (0.0, 0.0, 0.0));
    }

    #[test]
    fn deleting_a_matched_restored_gram_never_raises_recall() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let context: Vec<&[Token]> = d.context().iter().map(|u| u.tokens.as_slice()).collect();
        let current = &d.current().tokens;
        let reference = "深圳冬天就是经常阴天下雨";
        let full = restoration_prf("深圳经常阴天下雨", reference, &context, current, 1);
        let smaller = restoration_prf("圳经常阴天下雨", reference, &context, current, 1);
        assert!(smaller.recall <= full.recall);
    }

    #[test]
    fn corpus_report_identity_scores_one_everywhere() {
        let lines = [
            WEATHER_LINE,
            "今天去哪里玩\t去公园散步吧\t为什么去公园\t为什么去公园散步",
        ];
        let dialogues: Vec<Dialogue> =
            lines.iter().map(|l| parse_dataset_line(l).unwrap()).collect();
        let predictions: Vec<String> =
            dialogues.iter().map(|d| d.reference.clone().unwrap()).collect();
        let report = evaluate_corpus(&predictions, &dialogues).unwrap();
        assert_eq!(report.em, 1.0);
        for score in report.bleu.values() {
            assert_eq!(*score, 1.0);
        }
        for score in report.rouge.values() {
            assert_eq!(*score, 1.0);
        }
        for prf in report.restoration.values() {
            assert_eq!((prf.precision, prf.recall, prf.f_score), (1.0, 1.0, 1.0));
        }
        assert_eq!(report.corpus_size, 2);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        assert!(matches!(
            evaluate_corpus(&[], &[]),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    /// Independent scalar reimplementation of every metric on a small fixed
    /// corpus, kept deliberately naive.
    #[test]
    fn report_matches_naive_reimplementation() {
        let lines = [
            WEATHER_LINE,
            "你喜欢苹果吗\t喜欢苹果和香蕉\t为什么喜欢\t为什么喜欢苹果和香蕉",
            "weather in 深圳\tit rains a lot\twhy so\twhy it rains a lot in 深圳",
            "明天去爬山吗\t我有点累\t那就休息\t那就休息不去爬山",
            "see you at five\tmake it six\tok fine\tok fine six",
        ];
        let dialogues: Vec<Dialogue> =
            lines.iter().map(|l| parse_dataset_line(l).unwrap()).collect();
        let predictions = strings(&[
            "深圳冬天就是经常阴天下雨。",
            "为什么喜欢香蕉",
            "why it rains in 深圳",
            "那就休息不去爬山",
            "ok fine at six",
        ]);
        let report = evaluate_corpus(&predictions, &dialogues).unwrap();

        let texts = |s: &str| -> Vec<String> {
            tokenize(s).into_iter().map(|t| t.text).collect()
        };
        let grams = |toks: &[String], n: usize| -> Vec<Vec<String>> {
            if toks.len() < n {
                vec![]
            } else {
                toks.windows(n).map(|w| w.to_vec()).collect()
            }
        };
        let clip = |a: &[Vec<String>], b: &[Vec<String>]| -> usize {
            let mut b = b.to_vec();
            let mut hits = 0;
            for gram in a {
                if let Some(at) = b.iter().position(|g| g == gram) {
                    b.swap_remove(at);
                    hits += 1;
                }
            }
            hits
        };

        // BLEU-2, naive.
        let references: Vec<String> =
            dialogues.iter().map(|d| d.reference.clone().unwrap()).collect();
        let mut matched = [0usize; 2];
        let mut total = [0usize; 2];
        let (mut plen, mut rlen) = (0usize, 0usize);
        for (p, r) in predictions.iter().zip(&references) {
            let (pt, rt) = (texts(p), texts(r));
            plen += pt.len();
            rlen += rt.len();
            for n in 1..=2 {
                matched[n - 1] += clip(&grams(&pt, n), &grams(&rt, n));
                total[n - 1] += grams(&pt, n).len();
            }
        }
        let p1 = matched[0] as f64 / total[0] as f64;
        let p2 = matched[1] as f64 / total[1] as f64;
        let bp = (1.0 - rlen as f64 / plen as f64).min(0.0).exp();
        let naive_bleu2 = bp * (p1 * p2).sqrt();
        assert!((report.bleu[&2] - naive_bleu2).abs() < 1e-12);

        // ROUGE-1, naive macro F1.
        let mut rouge1 = 0.0;
        for (p, r) in predictions.iter().zip(&references) {
            let (pt, rt) = (texts(p), texts(r));
            let overlap = clip(&grams(&pt, 1), &grams(&rt, 1)) as f64;
            let precision = overlap / pt.len() as f64;
            let recall = overlap / rt.len() as f64;
            rouge1 += if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
        }
        let n_examples = predictions.len() as f64;
        assert!((report.rouge["1"] - rouge1 / n_examples).abs() < 1e-12);

        // EM, naive.
        let em =
            predictions.iter().zip(&references).filter(|(p, r)| p == r).count() as f64 / n_examples;
        assert_eq!(report.em, em);

        // Restoration-1, naive micro average.
        let (mut num, mut dp, mut dr) = (0usize, 0usize, 0usize);
        for ((p, r), d) in predictions.iter().zip(&references).zip(&dialogues) {
            let context: Vec<&[Token]> = d.context().iter().map(|u| u.tokens.as_slice()).collect();
            let restored = restored_word_set(&context, &d.current().tokens);
            let keep = |g: &Vec<String>| g.iter().any(|t| restored.contains(t));
            let pg: Vec<Vec<String>> = grams(&texts(p), 1).into_iter().filter(keep).collect();
            let rg: Vec<Vec<String>> = grams(&texts(r), 1).into_iter().filter(keep).collect();
            num += clip(&pg, &rg);
            dp += pg.len();
            dr += rg.len();
        }
        let precision = num as f64 / dp as f64;
        let recall = num as f64 / dr as f64;
        let prf = report.restoration[&1];
        assert!((prf.precision - precision).abs() < 1e-12);
        assert!((prf.recall - recall).abs() < 1e-12);

        // Table renders every section.
        let table = report.to_table();
        assert!(table.contains("BLEU-2"));
        assert!(table.contains("restoration F3"));
        assert!(table.contains("exact match"));
    }

    #[test]
    fn report_serializes_deterministically() {
        let d = parse_dataset_line(WEATHER_LINE).unwrap();
        let predictions = strings(&["深圳冬天就是经常阴天下雨。"]);
        let report = evaluate_corpus(&predictions, std::slice::from_ref(&d)).unwrap();
        let a = serde_json::to_string(&report).unwrap();
        let b = serde_json::to_string(&evaluate_corpus(&predictions, &[d]).unwrap()).unwrap();
        assert_eq!(a, b);
        let parsed: MetricReport = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed.em, report.em);
    }
}
