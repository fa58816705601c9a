//! Run configuration: a TOML file of key = value sections, overridden by
//! command-line flags (flags win).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sgt_core::labeler::LabelConfig;
use sgt_core::splicer::{DecodePolicy, DuplicateResolution, EmptyFallback};
use sgt_core::tagger::{EncoderConfig, ModelConfig, TrainConfig};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Worker threads for per-dialogue stages; 0 uses all cores, 1 runs
    /// sequentially. Training and bench are always single-threaded.
    pub workers: usize,
    pub paths: PathsSection,
    pub labeler: LabelerSection,
    pub encoder: EncoderSection,
    pub train: TrainSection,
    pub decode: DecodeSection,
    pub bench: BenchSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            workers: 1,
            paths: PathsSection::default(),
            labeler: LabelerSection::default(),
            encoder: EncoderSection::default(),
            train: TrainSection::default(),
            decode: DecodeSection::default(),
            bench: BenchSection::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    /// Input corpus for the current subcommand.
    pub corpus: Option<PathBuf>,
    /// Training corpus; falls back to `corpus` when unset.
    pub train_corpus: Option<PathBuf>,
    /// Held-out corpus used for checkpoint selection during training.
    pub dev_corpus: Option<PathBuf>,
    pub connection_words: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelerSection {
    pub tag_classes: usize,
}

impl Default for LabelerSection {
    fn default() -> Self {
        LabelerSection { tag_classes: sgt_core::labeler::DEFAULT_TAG_CLASSES }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderSection {
    pub embedding_dim: usize,
    pub context_window: usize,
    pub hidden_dim: usize,
    pub vocab_buckets: usize,
    pub max_positions: usize,
    pub speaker_width: usize,
}

impl Default for EncoderSection {
    fn default() -> Self {
        let enc = EncoderConfig::default();
        EncoderSection {
            embedding_dim: enc.embedding_dim,
            context_window: enc.context_window,
            hidden_dim: enc.hidden_dim,
            vocab_buckets: enc.vocab_buckets,
            max_positions: enc.max_positions,
            speaker_width: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Explicit tag-class weights; derived from the data when omitted.
    pub class_weights: Option<Vec<f64>>,
}

impl Default for TrainSection {
    fn default() -> Self {
        let cfg = TrainConfig::default();
        TrainSection {
            learning_rate: cfg.learning_rate,
            dropout: cfg.dropout_rate,
            epochs: cfg.epochs,
            batch_size: cfg.batch_size,
            seed: cfg.seed,
            class_weights: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodeSection {
    /// "latest" or "score".
    pub policy: String,
    /// "copy" or "empty".
    pub fallback: String,
}

impl Default for DecodeSection {
    fn default() -> Self {
        DecodeSection { policy: "latest".into(), fallback: "copy".into() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    pub warmup: usize,
    pub repetitions: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection { warmup: 10, repetitions: 1 }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let Some(path) = path else { return Ok(RunConfig::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn apply_overrides(&mut self, args: &crate::CommonArgs) {
        if let Some(seed) = args.seed {
            self.train.seed = seed;
        }
        if let Some(ref corpus) = args.corpus {
            self.paths.corpus = Some(corpus.clone());
        }
        if let Some(ref model) = args.model {
            self.paths.model = Some(model.clone());
        }
        if let Some(ref out) = args.out {
            self.paths.out_dir = Some(out.clone());
        }
        if let Some(ref words) = args.connection_words {
            self.paths.connection_words = Some(words.clone());
        }
        if let Some(tag_classes) = args.tag_classes {
            self.labeler.tag_classes = tag_classes;
        }
        if let Some(ref policy) = args.policy {
            self.decode.policy = policy.clone();
        }
        if let Some(workers) = args.workers {
            self.workers = workers;
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.labeler.tag_classes < 2 {
            return Err(CliError::Usage("tag_classes must be at least 2".into()));
        }
        if !matches!(self.decode.policy.as_str(), "latest" | "score") {
            return Err(CliError::Usage(format!(
                "unknown decode policy {:?} (use \"latest\" or \"score\")",
                self.decode.policy
            )));
        }
        if !matches!(self.decode.fallback.as_str(), "copy" | "empty") {
            return Err(CliError::Usage(format!(
                "unknown decode fallback {:?} (use \"copy\" or \"empty\")",
                self.decode.fallback
            )));
        }
        Ok(())
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            encoder: EncoderConfig {
                embedding_dim: self.encoder.embedding_dim,
                context_window: self.encoder.context_window,
                hidden_dim: self.encoder.hidden_dim,
                vocab_buckets: self.encoder.vocab_buckets,
                max_positions: self.encoder.max_positions,
            },
            tag_classes: self.labeler.tag_classes,
            speaker_width: self.encoder.speaker_width,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.train.learning_rate,
            dropout_rate: self.train.dropout,
            class_weights: self.train.class_weights.clone(),
            epochs: self.train.epochs,
            batch_size: self.train.batch_size,
            seed: self.train.seed,
        }
    }

    pub fn label_config(&self, connection_words: Vec<String>) -> LabelConfig {
        LabelConfig {
            tag_classes: self.labeler.tag_classes,
            connection_words,
            speaker_width: self.encoder.speaker_width,
        }
    }

    pub fn decode_policy(&self) -> DecodePolicy {
        DecodePolicy {
            duplicate_resolution: match self.decode.policy.as_str() {
                "score" => DuplicateResolution::HighestMeanScore,
                _ => DuplicateResolution::LatestRun,
            },
            empty_fallback: match self.decode.fallback.as_str() {
                "empty" => EmptyFallback::EmptyOutput,
                _ => EmptyFallback::CopyLastUtterance,
            },
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.paths.out_dir.clone().unwrap_or_else(|| PathBuf::from("sgt-out"))
    }

    /// Stable fingerprint of the effective configuration, recorded in
    /// machine-readable reports.
    pub fn config_hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
