//! Rewriting incomplete dialogue utterances by sequence tagging.
//!
//! The pipeline reduces utterance rewriting to token tagging over the
//! dialogue history: training labels are built by greedily decomposing the
//! reference rewrite into ordered fragments found verbatim in the history
//! ([`labeler`]), a small multi-task tagger learns to predict those tags
//! ([`tagger`]), and inference splices the predicted fragments back together
//! in tag order ([`splicer`]). [`metrics`] scores outputs with the usual
//! n-gram battery plus restoration precision/recall over context words.

pub mod corpus;
pub mod labeler;
pub mod metrics;
pub mod splicer;
pub mod synth;
pub mod tagger;
pub mod text_units;

pub use corpus::{assemble_input, AssembledInput, CorpusError, Dialogue, Utterance};
pub use labeler::{build_labeled_example, GlcsSpan, LabelConfig, LabelError, LabeledExample, TagLabel};
pub use splicer::{DecodePolicy, DuplicateResolution, EmptyFallback};
pub use tagger::{EncoderConfig, ModelConfig, TaggerError, TaggerParams, TrainConfig};
pub use text_units::{detokenize, tokenize, GranularityClass, Token};
