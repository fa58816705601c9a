//! Analytic gradient of the joint objective, verified against central finite
//! differences in the test suite.

use crate::corpus::AssembledInput;
use crate::labeler::TagLabel;

use super::loss::softmax;
use super::{ForwardTrace, Head, TaggerError, TaggerParams};

/// Gradient tensors, shaped exactly like [`TaggerParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerGrads {
    pub token_embeddings: Vec<f64>,
    pub boundary_embedding: Vec<f64>,
    pub position_embeddings: Vec<f64>,
    pub mixer_weight: Vec<f64>,
    pub mixer_bias: Vec<f64>,
    pub head_sgt: Head,
    pub head_gd: Head,
    pub head_ged: Head,
}

impl TaggerGrads {
    pub fn zeros_like(params: &TaggerParams) -> Self {
        let zero = |v: &Vec<f64>| vec![0.0; v.len()];
        TaggerGrads {
            token_embeddings: zero(&params.token_embeddings),
            boundary_embedding: zero(&params.boundary_embedding),
            position_embeddings: zero(&params.position_embeddings),
            mixer_weight: zero(&params.mixer_weight),
            mixer_bias: zero(&params.mixer_bias),
            head_sgt: Head { weight: zero(&params.head_sgt.weight), bias: zero(&params.head_sgt.bias) },
            head_gd: Head { weight: zero(&params.head_gd.weight), bias: zero(&params.head_gd.bias) },
            head_ged: Head { weight: zero(&params.head_ged.weight), bias: zero(&params.head_ged.bias) },
        }
    }

    pub fn zero(&mut self) {
        for tensor in self.tensors_mut() {
            tensor.fill(0.0);
        }
    }

    /// All tensors in the declared parameter order.
    pub fn tensors(&self) -> [&[f64]; 11] {
        [
            &self.token_embeddings,
            &self.boundary_embedding,
            &self.position_embeddings,
            &self.mixer_weight,
            &self.mixer_bias,
            &self.head_sgt.weight,
            &self.head_sgt.bias,
            &self.head_gd.weight,
            &self.head_gd.bias,
            &self.head_ged.weight,
            &self.head_ged.bias,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 11] {
        [
            &mut self.token_embeddings,
            &mut self.boundary_embedding,
            &mut self.position_embeddings,
            &mut self.mixer_weight,
            &mut self.mixer_bias,
            &mut self.head_sgt.weight,
            &mut self.head_sgt.bias,
            &mut self.head_gd.weight,
            &mut self.head_gd.bias,
            &mut self.head_ged.weight,
            &mut self.head_ged.bias,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }
}

impl TaggerParams {
    /// Parameter tensors in the same declared order as the gradients.
    pub fn tensors(&self) -> [&[f64]; 11] {
        [
            &self.token_embeddings,
            &self.boundary_embedding,
            &self.position_embeddings,
            &self.mixer_weight,
            &self.mixer_bias,
            &self.head_sgt.weight,
            &self.head_sgt.bias,
            &self.head_gd.weight,
            &self.head_gd.bias,
            &self.head_ged.weight,
            &self.head_ged.bias,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn tensors_mut(&mut self) -> [&mut Vec<f64>; 11] {
        [
            &mut self.token_embeddings,
            &mut self.boundary_embedding,
            &mut self.position_embeddings,
            &mut self.mixer_weight,
            &mut self.mixer_bias,
            &mut self.head_sgt.weight,
            &mut self.head_sgt.bias,
            &mut self.head_gd.weight,
            &mut self.head_gd.bias,
            &mut self.head_ged.weight,
            &mut self.head_ged.bias,
        ]
    }
}

/// d(mean cross-entropy)/d(logits) for one token: `scale * (softmax - onehot)`.
fn logit_grad(logits: &[f64], target: usize, scale: f64) -> Vec<f64> {
    let mut grad = softmax(logits);
    grad[target] -= 1.0;
    for g in &mut grad {
        *g *= scale;
    }
    grad
}

/// Backpropagate one head: accumulates weight/bias gradients and adds the
/// input-side gradient into `dea`.
fn backprop_head(head: &Head, grad: &mut Head, ea_row: &[f64], dlogits: &[f64], dea: &mut [f64]) {
    let classes = head.classes();
    for (c, &dl) in dlogits.iter().enumerate() {
        grad.bias[c] += dl;
    }
    for (j, &v) in ea_row.iter().enumerate() {
        let w = &head.weight[j * classes..(j + 1) * classes];
        let gw = &mut grad.weight[j * classes..(j + 1) * classes];
        let mut acc = 0.0;
        for (c, &dl) in dlogits.iter().enumerate() {
            gw[c] += v * dl;
            acc += w[c] * dl;
        }
        dea[j] += acc;
    }
}

/// Accumulate the gradient of the joint loss for one example into `grads`.
///
/// `trace` must come from a forward pass over the same `input` and `params`;
/// its recorded dropout scaling is reused so the gradient matches the loss
/// that was actually computed. `scale` multiplies the whole contribution
/// (1/batch_size during training).
#[allow(clippy::too_many_arguments)]
pub fn accumulate_gradient(
    input: &AssembledInput,
    trace: &ForwardTrace,
    y_sgt: &[TagLabel],
    y_gd: &[u8],
    y_ged: &[u8],
    params: &TaggerParams,
    class_weights: &[f64],
    scale: f64,
    grads: &mut TaggerGrads,
) -> Result<(), TaggerError> {
    let enc = &params.config.encoder;
    let len = input.len();
    let d = enc.embedding_dim;
    let hidden = enc.hidden_dim;
    let window = enc.context_window as isize;
    let reach = window / 2;
    let inv_len = scale / len as f64;
    let ids: Vec<usize> = input.tokens.iter().map(|t| params.token_id(&t.text)).collect();

    let mut z = vec![0.0; enc.context_window * d];
    for i in 0..len {
        let sgt_class = y_sgt[i].class_index();
        if sgt_class >= params.config.tag_classes || sgt_class >= class_weights.len() {
            return Err(TaggerError::LabelOutOfRange {
                class: sgt_class,
                classes: params.config.tag_classes,
            });
        }
        let d_sgt = logit_grad(&trace.logits_sgt[i], sgt_class, class_weights[sgt_class] * inv_len);
        let d_gd = logit_grad(&trace.logits_gd[i], usize::from(y_gd[i]), inv_len);
        let d_ged = logit_grad(&trace.logits_ged[i], usize::from(y_ged[i]), inv_len);

        let mut dea = vec![0.0; trace.ea[i].len()];
        backprop_head(&params.head_sgt, &mut grads.head_sgt, &trace.ea[i], &d_sgt, &mut dea);
        backprop_head(&params.head_gd, &mut grads.head_gd, &trace.ea[i], &d_gd, &mut dea);
        backprop_head(&params.head_ged, &mut grads.head_ged, &trace.ea[i], &d_ged, &mut dea);

        // Through dropout and tanh into the mixer inputs.
        let mut dpre = vec![0.0; hidden];
        for h in 0..hidden {
            let de = dea[h] * trace.dropout_scale[i][h];
            dpre[h] = de * (1.0 - trace.e[i][h] * trace.e[i][h]);
            grads.mixer_bias[h] += dpre[h];
        }

        // Rebuild the window input z_i to form the mixer weight gradient.
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
        for (q, &zq) in z.iter().enumerate() {
            let gw = &mut grads.mixer_weight[q * hidden..(q + 1) * hidden];
            let w = &params.mixer_weight[q * hidden..(q + 1) * hidden];
            let mut dz_q = 0.0;
            for h in 0..hidden {
                gw[h] += zq * dpre[h];
                dz_q += w[h] * dpre[h];
            }
            // Route dz back into the embeddings feeding this slot.
            let slot = q / d;
            let j = q % d;
            let p = i as isize + (slot as isize - reach);
            if p < 0 || p >= len as isize {
                grads.boundary_embedding[j] += dz_q;
            } else {
                let p = p as usize;
                grads.token_embeddings[ids[p] * d + j] += dz_q;
                grads.position_embeddings[p * d + j] += dz_q;
            }
        }
    }
    if !grads.is_finite() {
        return Err(TaggerError::NonFiniteGradient);
    }
    Ok(())
}

/// Gradient of the joint loss for a single example.
pub fn gradient(
    input: &AssembledInput,
    trace: &ForwardTrace,
    y_sgt: &[TagLabel],
    y_gd: &[u8],
    y_ged: &[u8],
    params: &TaggerParams,
    class_weights: &[f64],
) -> Result<TaggerGrads, TaggerError> {
    let mut grads = TaggerGrads::zeros_like(params);
    accumulate_gradient(input, trace, y_sgt, y_gd, y_ged, params, class_weights, 1.0, &mut grads)?;
    Ok(grads)
}
