//! The trainable tagger: a windowed token encoder, speaker-aware
//! concatenation, and three linear heads (tag order, fragment detection,
//! fragment edge detection) trained jointly with summed cross-entropy
//! losses.
//!
//! The encoder sits behind plain functions over [`TaggerParams`], so a
//! heavier contextual encoder can replace it without touching the labeler,
//! splicer or metrics: only `encode` and its parameter block would change.

mod backward;
mod forward;
mod loss;
mod params_io;
mod train;

pub use backward::{gradient, TaggerGrads};
pub use forward::{apply_speaker, encode, forward, predict_tags, predict_with_scores, ForwardTrace, Mode};
pub use loss::{loss_ged_track as loss_ged, loss_gd_track as loss_gd, loss_sgt, total_loss};
pub use params_io::{load_params, load_params_expecting, save_params, ParamsIoError};
pub use train::{default_class_weights, train, EpochStats, TrainConfig, TrainOutcome};

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("input has {len} tokens but the model supports at most {max}")]
    SequenceTooLong { len: usize, max: usize },
    #[error("label class {class} out of range for {classes} classes")]
    LabelOutOfRange { class: usize, classes: usize },
    #[error("gradient contains non-finite values")]
    NonFiniteGradient,
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

/// Shape of the reference encoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderConfig {
    /// Width of token and position embeddings.
    pub embedding_dim: usize,
    /// Number of neighboring positions mixed per token; must be odd.
    pub context_window: usize,
    /// Width of the contextual representation.
    pub hidden_dim: usize,
    /// Bucket count of the hashed token vocabulary.
    pub vocab_buckets: usize,
    /// Longest supported input; longer sequences are rejected.
    pub max_positions: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            embedding_dim: 64,
            context_window: 5,
            hidden_dim: 128,
            vocab_buckets: 1 << 16,
            max_positions: 512,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<(), TaggerError> {
        if self.context_window.is_multiple_of(2) {
            return Err(TaggerError::BadConfig("context_window must be odd".into()));
        }
        if self.embedding_dim == 0 || self.hidden_dim == 0 || self.vocab_buckets == 0 {
            return Err(TaggerError::BadConfig("dimensions must be positive".into()));
        }
        Ok(())
    }
}

/// Full model shape: encoder plus head widths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelConfig {
    pub encoder: EncoderConfig,
    /// Number of tag classes (outside + order letters).
    pub tag_classes: usize,
    /// Width of the speaker indicator appended to the encoder output.
    pub speaker_width: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            encoder: EncoderConfig::default(),
            tag_classes: crate::labeler::DEFAULT_TAG_CLASSES,
            speaker_width: 1,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), TaggerError> {
        self.encoder.validate()?;
        if self.tag_classes < 2 {
            return Err(TaggerError::BadConfig("need at least 2 tag classes".into()));
        }
        if self.speaker_width == 0 {
            return Err(TaggerError::BadConfig("speaker_width must be positive".into()));
        }
        Ok(())
    }

    /// Width of the concatenated representation fed to the heads.
    pub fn concat_dim(&self) -> usize {
        self.encoder.hidden_dim + self.speaker_width
    }
}

/// One linear head: weight is `(hidden+S) x classes`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Head {
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Head {
    fn zeros(inputs: usize, classes: usize) -> Self {
        Head { weight: vec![0.0; inputs * classes], bias: vec![0.0; classes] }
    }

    pub fn classes(&self) -> usize {
        self.bias.len()
    }
}

/// All trainable weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggerParams {
    pub config: ModelConfig,
    /// `vocab_buckets x embedding_dim`, row-major.
    pub token_embeddings: Vec<f64>,
    /// Embedding used for window slots that fall outside the sequence.
    pub boundary_embedding: Vec<f64>,
    /// `max_positions x embedding_dim`, row-major.
    pub position_embeddings: Vec<f64>,
    /// `(context_window * embedding_dim) x hidden_dim`, row-major.
    pub mixer_weight: Vec<f64>,
    pub mixer_bias: Vec<f64>,
    pub head_sgt: Head,
    pub head_gd: Head,
    pub head_ged: Head,
}

impl TaggerParams {
    /// All-zero parameters of the given shape.
    pub fn zeros(config: &ModelConfig) -> Result<Self, TaggerError> {
        config.validate()?;
        let enc = &config.encoder;
        let concat = config.concat_dim();
        Ok(TaggerParams {
            config: config.clone(),
            token_embeddings: vec![0.0; enc.vocab_buckets * enc.embedding_dim],
            boundary_embedding: vec![0.0; enc.embedding_dim],
            position_embeddings: vec![0.0; enc.max_positions * enc.embedding_dim],
            mixer_weight: vec![0.0; enc.context_window * enc.embedding_dim * enc.hidden_dim],
            mixer_bias: vec![0.0; enc.hidden_dim],
            head_sgt: Head::zeros(concat, config.tag_classes),
            head_gd: Head::zeros(concat, 2),
            head_ged: Head::zeros(concat, 2),
        })
    }

    /// Random initialization, deterministic for a given rng state.
    pub fn init(config: &ModelConfig, rng: &mut ChaCha20Rng) -> Result<Self, TaggerError> {
        let mut params = Self::zeros(config)?;
        let enc = &config.encoder;
        let emb_scale = 0.1;
        let mix_scale = 1.0 / ((enc.context_window * enc.embedding_dim) as f64).sqrt();
        let head_scale = 1.0 / (config.concat_dim() as f64).sqrt();
        let fill = |values: &mut [f64], scale: f64, rng: &mut ChaCha20Rng| {
            for v in values {
                *v = rng.gen_range(-scale..scale);
            }
        };
        fill(&mut params.token_embeddings, emb_scale, rng);
        fill(&mut params.boundary_embedding, emb_scale, rng);
        fill(&mut params.position_embeddings, emb_scale, rng);
        fill(&mut params.mixer_weight, mix_scale, rng);
        fill(&mut params.head_sgt.weight, head_scale, rng);
        fill(&mut params.head_gd.weight, head_scale, rng);
        fill(&mut params.head_ged.weight, head_scale, rng);
        Ok(params)
    }

    /// Bucket id for a token surface form. FNV-1a keeps the mapping stable
    /// across runs and platforms.
    pub fn token_id(&self, text: &str) -> usize {
        hash_bucket(text, self.config.encoder.vocab_buckets)
    }

    pub(crate) fn token_embedding(&self, id: usize) -> &[f64] {
        let d = self.config.encoder.embedding_dim;
        &self.token_embeddings[id * d..(id + 1) * d]
    }

    pub(crate) fn position_embedding(&self, position: usize) -> &[f64] {
        let d = self.config.encoder.embedding_dim;
        &self.position_embeddings[position * d..(position + 1) * d]
    }
}

/// FNV-1a 64-bit bucket hash for the token vocabulary.
pub fn hash_bucket(text: &str, buckets: usize) -> usize {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (hash % buckets as u64) as usize
}
