//! Forward pass: windowed encoding, speaker concatenation, head logits and
//! tag prediction.

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::corpus::AssembledInput;
use crate::labeler::TagLabel;

use super::{Head, TaggerError, TaggerParams};

/// Whether dropout is live. Training needs the rng that drives the dropout
/// stream; inference never draws randomness.
pub enum Mode<'a> {
    Train { dropout_rate: f64, rng: &'a mut ChaCha20Rng },
    Infer,
}

/// All per-token activations of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    /// Contextual encoding, `M x hidden_dim`.
    pub e: Vec<Vec<f64>>,
    /// Encoding with the speaker indicator appended, `M x (hidden+S)`.
    pub ea: Vec<Vec<f64>>,
    pub logits_sgt: Vec<Vec<f64>>,
    pub logits_gd: Vec<Vec<f64>>,
    pub logits_ged: Vec<Vec<f64>>,
    /// Per-coordinate dropout scaling applied to `e` inside `ea`
    /// (0 dropped, 1/(1-p) kept, 1 everywhere at inference).
    pub dropout_scale: Vec<Vec<f64>>,
}

/// Contextual encoding: for each position, sum token and position embeddings
/// over a window of `context_window` neighbors (boundary slots use the
/// dedicated boundary embedding), concatenate the window, then apply the
/// mixer with a tanh nonlinearity.
pub fn encode(input: &AssembledInput, params: &TaggerParams) -> Result<Vec<Vec<f64>>, TaggerError> {
    let enc = &params.config.encoder;
    let len = input.len();
    if len > enc.max_positions {
        return Err(TaggerError::SequenceTooLong { len, max: enc.max_positions });
    }
    let d = enc.embedding_dim;
    let window = enc.context_window as isize;
    let reach = window / 2;
    let ids: Vec<usize> = input.tokens.iter().map(|t| params.token_id(&t.text)).collect();

    let mut rows = Vec::with_capacity(len);
    let mut z = vec![0.0; enc.context_window * d];
    for i in 0..len {
        for (slot, offset) in (-reach..=reach).enumerate() {
            let target = &mut z[slot * d..(slot + 1) * d];
            let p = i as isize + offset;
            if p < 0 || p >= len as isize {
                target.copy_from_slice(&params.boundary_embedding);
            } else {
                let p = p as usize;
                let tok = params.token_embedding(ids[p]);
                let pos = params.position_embedding(p);
                for (t, (a, b)) in target.iter_mut().zip(tok.iter().zip(pos)) {
                    *t = a + b;
                }
            }
        }
        let mut row = params.mixer_bias.clone();
        for (q, &zq) in z.iter().enumerate() {
            if zq == 0.0 {
                continue;
            }
            let w = &params.mixer_weight[q * enc.hidden_dim..(q + 1) * enc.hidden_dim];
            for (r, &wq) in row.iter_mut().zip(w) {
                *r += zq * wq;
            }
        }
        for r in &mut row {
            *r = r.tanh();
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Append the speaker indicator to each encoder row, applying dropout to the
/// encoder part only. Returns the concatenated rows and the dropout scaling
/// used (needed to backpropagate through the same mask).
pub fn apply_speaker(
    e: &[Vec<f64>],
    speaker_track: &[Vec<f64>],
    mode: &mut Mode,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut ea = Vec::with_capacity(e.len());
    let mut scales = Vec::with_capacity(e.len());
    for (row, speaker) in e.iter().zip(speaker_track) {
        let scale: Vec<f64> = match mode {
            Mode::Train { dropout_rate, rng } if *dropout_rate > 0.0 => {
                let keep = 1.0 - *dropout_rate;
                row.iter().map(|_| if rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 }).collect()
            }
            _ => vec![1.0; row.len()],
        };
        let mut out: Vec<f64> = row.iter().zip(&scale).map(|(v, s)| v * s).collect();
        out.extend_from_slice(speaker);
        ea.push(out);
        scales.push(scale);
    }
    (ea, scales)
}

fn head_logits(ea: &[Vec<f64>], head: &Head) -> Vec<Vec<f64>> {
    let classes = head.classes();
    ea.iter()
        .map(|row| {
            let mut logits = head.bias.clone();
            for (j, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let w = &head.weight[j * classes..(j + 1) * classes];
                for (l, &wj) in logits.iter_mut().zip(w) {
                    *l += v * wj;
                }
            }
            logits
        })
        .collect()
}

/// Full forward pass through encoder, speaker concat and the three heads.
pub fn forward(
    input: &AssembledInput,
    params: &TaggerParams,
    mode: &mut Mode,
) -> Result<ForwardTrace, TaggerError> {
    let e = encode(input, params)?;
    let (ea, dropout_scale) = apply_speaker(&e, &input.speaker_track, mode);
    Ok(ForwardTrace {
        logits_sgt: head_logits(&ea, &params.head_sgt),
        logits_gd: head_logits(&ea, &params.head_gd),
        logits_ged: head_logits(&ea, &params.head_ged),
        e,
        ea,
        dropout_scale,
    })
}

/// Row-wise argmax with ties broken toward the lower class index, so an
/// all-equal row predicts outside.
pub fn argmax_tags(logits_sgt: &[Vec<f64>]) -> Vec<TagLabel> {
    logits_sgt
        .iter()
        .map(|row| {
            let mut best = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = c;
                }
            }
            TagLabel::from_class_index(best)
        })
        .collect()
}

/// Predict the tag track for an input.
pub fn predict_tags(input: &AssembledInput, params: &TaggerParams) -> Result<Vec<TagLabel>, TaggerError> {
    let trace = forward(input, params, &mut Mode::Infer)?;
    Ok(argmax_tags(&trace.logits_sgt))
}

/// Predict tags along with per-token class probabilities (softmax rows of
/// the tag head), for score-based decode policies.
pub fn predict_with_scores(
    input: &AssembledInput,
    params: &TaggerParams,
) -> Result<(Vec<TagLabel>, Vec<Vec<f64>>), TaggerError> {
    let trace = forward(input, params, &mut Mode::Infer)?;
    let scores = trace.logits_sgt.iter().map(|row| super::loss::softmax(row)).collect();
    Ok((argmax_tags(&trace.logits_sgt), scores))
}
