//! Mini-batch training with adaptive moment estimation. Everything is
//! deterministic under a fixed seed: initialization, epoch shuffles and the
//! dropout stream all draw from one seeded generator in a fixed order.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::labeler::{LabeledExample, TagLabel};

use super::backward::{accumulate_gradient, TaggerGrads};
use super::forward::{argmax_tags, forward, Mode};
use super::loss::{loss_gd_track, loss_ged_track, loss_sgt};
use super::{TaggerError, TaggerParams};

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub dropout_rate: f64,
    /// Per-class weights for the tag loss; `None` derives them from the
    /// class frequencies of the training split.
    pub class_weights: Option<Vec<f64>>,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            dropout_rate: 0.3,
            class_weights: None,
            epochs: 50,
            batch_size: 16,
            seed: 13,
        }
    }
}

/// One line of the training log.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss_sgt: f64,
    pub loss_gd: f64,
    pub loss_ged: f64,
    pub loss_final: f64,
    pub token_accuracy: f64,
}

/// Result of a training run. When a non-finite loss aborts training,
/// `diverged_at` holds the failing epoch and `params` is the last finished
/// epoch's checkpoint.
#[derive(Debug)]
pub struct TrainOutcome {
    pub params: TaggerParams,
    pub log: Vec<EpochStats>,
    pub class_weights: Vec<f64>,
    pub diverged_at: Option<usize>,
}

/// Frequency-balancing weights: outside stays at 1, each order class gets
/// freq(O)/freq(class) clamped to [1, 20]. Unseen classes get the cap.
pub fn default_class_weights(examples: &[LabeledExample], tag_classes: usize) -> Vec<f64> {
    let mut counts = vec![0usize; tag_classes];
    for example in examples {
        for label in &example.y_sgt {
            counts[label.class_index()] += 1;
        }
    }
    let outside = counts[0] as f64;
    let mut weights = vec![1.0; tag_classes];
    for (class, weight) in weights.iter_mut().enumerate().skip(1) {
        *weight = if counts[class] == 0 {
            20.0
        } else {
            (outside / counts[class] as f64).clamp(1.0, 20.0)
        };
    }
    weights
}

struct AdamState {
    m: TaggerGrads,
    v: TaggerGrads,
    step: u64,
}

impl AdamState {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPSILON: f64 = 1e-8;

    fn new(params: &TaggerParams) -> Self {
        AdamState {
            m: TaggerGrads::zeros_like(params),
            v: TaggerGrads::zeros_like(params),
            step: 0,
        }
    }

    fn update(&mut self, params: &mut TaggerParams, grads: &TaggerGrads, learning_rate: f64) {
        self.step += 1;
        let correction1 = 1.0 - Self::BETA1.powi(self.step as i32);
        let correction2 = 1.0 - Self::BETA2.powi(self.step as i32);
        let lr = learning_rate * correction2.sqrt() / correction1;
        let grads = grads.tensors();
        let mut m = self.m.tensors_mut();
        let mut v = self.v.tensors_mut();
        for (t, tensor) in params.tensors_mut().into_iter().enumerate() {
            let (g, m, v) = (grads[t], &mut m[t], &mut v[t]);
            for k in 0..tensor.len() {
                m[k] = Self::BETA1 * m[k] + (1.0 - Self::BETA1) * g[k];
                v[k] = Self::BETA2 * v[k] + (1.0 - Self::BETA2) * g[k] * g[k];
                tensor[k] -= lr * m[k] / (v[k].sqrt() + Self::EPSILON);
            }
        }
    }
}

fn token_accuracy(params: &TaggerParams, examples: &[LabeledExample]) -> Result<f64, TaggerError> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for example in examples {
        let trace = forward(&example.input, params, &mut Mode::Infer)?;
        let tags = argmax_tags(&trace.logits_sgt);
        total += tags.len();
        correct += tags.iter().zip(&example.y_sgt).filter(|(a, b)| a == b).count();
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

fn validate_examples(
    examples: &[LabeledExample],
    params: &TaggerParams,
) -> Result<(), TaggerError> {
    let width = params.config.speaker_width;
    for example in examples {
        if example.input.speaker_width() != width {
            return Err(TaggerError::BadConfig(format!(
                "example speaker track width {} does not match model width {width}",
                example.input.speaker_width()
            )));
        }
        for label in &example.y_sgt {
            if let TagLabel::Inside(order) = label {
                if order + 1 >= params.config.tag_classes {
                    return Err(TaggerError::LabelOutOfRange {
                        class: order + 1,
                        classes: params.config.tag_classes,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Train a tagger on labeled examples.
///
/// When `dev` is given, the returned parameters are the checkpoint with the
/// best dev token accuracy; otherwise the final epoch's parameters.
pub fn train(
    examples: &[LabeledExample],
    dev: Option<&[LabeledExample]>,
    model: &super::ModelConfig,
    config: &TrainConfig,
) -> Result<TrainOutcome, TaggerError> {
    if examples.is_empty() {
        return Err(TaggerError::BadConfig("training needs at least one example".into()));
    }
    if config.batch_size == 0 {
        return Err(TaggerError::BadConfig("batch_size must be positive".into()));
    }
    let class_weights = match &config.class_weights {
        Some(weights) => {
            if weights.len() != model.tag_classes {
                return Err(TaggerError::BadConfig(format!(
                    "expected {} class weights, got {}",
                    model.tag_classes,
                    weights.len()
                )));
            }
            if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
                return Err(TaggerError::BadConfig("class weights must be positive".into()));
            }
            weights.clone()
        }
        None => default_class_weights(examples, model.tag_classes),
    };

    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut params = TaggerParams::init(model, &mut rng)?;
    validate_examples(examples, &params)?;
    if let Some(dev) = dev {
        validate_examples(dev, &params)?;
    }

    let mut adam = AdamState::new(&params);
    let mut grads = TaggerGrads::zeros_like(&params);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut log = Vec::with_capacity(config.epochs);
    let mut last_good = params.clone();
    let mut best: Option<(f64, TaggerParams)> = None;

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut sums = (0.0, 0.0, 0.0);
        for batch in order.chunks(config.batch_size) {
            grads.zero();
            let scale = 1.0 / batch.len() as f64;
            for &index in batch {
                let example = &examples[index];
                let mut mode = Mode::Train { dropout_rate: config.dropout_rate, rng: &mut rng };
                let trace = forward(&example.input, &params, &mut mode)?;
                let l_sgt = loss_sgt(&trace.logits_sgt, &example.y_sgt, &class_weights)?;
                let l_gd = loss_gd_track(&trace.logits_gd, &example.y_gd)?;
                let l_ged = loss_ged_track(&trace.logits_ged, &example.y_ged)?;
                sums.0 += l_sgt;
                sums.1 += l_gd;
                sums.2 += l_ged;
                if !(l_sgt + l_gd + l_ged).is_finite() {
                    log::error!("non-finite loss in epoch {epoch}; stopping at last checkpoint");
                    return Ok(TrainOutcome {
                        params: last_good,
                        log,
                        class_weights,
                        diverged_at: Some(epoch),
                    });
                }
                accumulate_gradient(
                    &example.input,
                    &trace,
                    &example.y_sgt,
                    &example.y_gd,
                    &example.y_ged,
                    &params,
                    &class_weights,
                    scale,
                    &mut grads,
                )?;
            }
            adam.update(&mut params, &grads, config.learning_rate);
        }

        let n = examples.len() as f64;
        let accuracy = token_accuracy(&params, examples)?;
        let stats = EpochStats {
            epoch,
            loss_sgt: sums.0 / n,
            loss_gd: sums.1 / n,
            loss_ged: sums.2 / n,
            loss_final: (sums.0 + sums.1 + sums.2) / n,
            token_accuracy: accuracy,
        };
        log::debug!(
            "epoch {}: loss {:.6} token_acc {:.4}",
            stats.epoch,
            stats.loss_final,
            stats.token_accuracy
        );
        log.push(stats);
        if params.is_finite() {
            last_good = params.clone();
        }

        if let Some(dev) = dev {
            let dev_accuracy = token_accuracy(&params, dev)?;
            if best.as_ref().is_none_or(|(acc, _)| dev_accuracy > *acc) {
                best = Some((dev_accuracy, params.clone()));
            }
        }
    }

    let params = match best {
        Some((_, checkpoint)) => checkpoint,
        None => params,
    };
    Ok(TrainOutcome { params, log, class_weights, diverged_at: None })
}
