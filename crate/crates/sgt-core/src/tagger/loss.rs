//! Token-level cross-entropy losses for the three heads and their unweighted
//! sum. All losses are means over tokens, so an all-uniform tag head scores
//! ln(classes) regardless of sequence length.

use crate::labeler::TagLabel;

use super::{ForwardTrace, TaggerError};

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&v| v / sum).collect()
}

/// log(softmax(logits)[class]) computed via log-sum-exp.
fn log_prob(logits: &[f64], class: usize) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|&v| (v - max).exp()).sum();
    (logits[class] - max) - sum.ln()
}

/// Weighted tag loss: mean over tokens of `class_weights[target]` times the
/// cross-entropy against the target class.
pub fn loss_sgt(
    logits_sgt: &[Vec<f64>],
    y_sgt: &[TagLabel],
    class_weights: &[f64],
) -> Result<f64, TaggerError> {
    assert_eq!(logits_sgt.len(), y_sgt.len(), "logit rows must match label count");
    let mut total = 0.0;
    for (logits, label) in logits_sgt.iter().zip(y_sgt) {
        let class = label.class_index();
        if class >= logits.len() || class >= class_weights.len() {
            return Err(TaggerError::LabelOutOfRange { class, classes: logits.len() });
        }
        total -= class_weights[class] * log_prob(logits, class);
    }
    Ok(total / logits_sgt.len() as f64)
}

/// Mean binary cross-entropy over tokens for a two-class head.
fn binary_track_loss(logits: &[Vec<f64>], y: &[u8]) -> Result<f64, TaggerError> {
    assert_eq!(logits.len(), y.len(), "logit rows must match label count");
    let mut total = 0.0;
    for (row, &label) in logits.iter().zip(y) {
        let class = usize::from(label);
        if class >= row.len() {
            return Err(TaggerError::LabelOutOfRange { class, classes: row.len() });
        }
        total -= log_prob(row, class);
    }
    Ok(total / logits.len() as f64)
}

/// Fragment-detection loss.
pub fn loss_gd_track(logits_gd: &[Vec<f64>], y_gd: &[u8]) -> Result<f64, TaggerError> {
    binary_track_loss(logits_gd, y_gd)
}

/// Fragment-edge-detection loss.
pub fn loss_ged_track(logits_ged: &[Vec<f64>], y_ged: &[u8]) -> Result<f64, TaggerError> {
    binary_track_loss(logits_ged, y_ged)
}

/// Joint objective: the exact unweighted sum of the three task losses.
pub fn total_loss(
    trace: &ForwardTrace,
    y_sgt: &[TagLabel],
    y_gd: &[u8],
    y_ged: &[u8],
    class_weights: &[f64],
) -> Result<f64, TaggerError> {
    Ok(loss_sgt(&trace.logits_sgt, y_sgt, class_weights)?
        + loss_gd_track(&trace.logits_gd, y_gd)?
        + loss_ged_track(&trace.logits_ged, y_ged)?)
}
