//! Binary parameter files: a `SGTM` magic, a versioned little-endian header
//! describing the model shape, the raw f64 tensors in declared order, and a
//! trailing SHA-256 checksum over everything before it.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{EncoderConfig, Head, ModelConfig, TaggerParams};

const MAGIC: &[u8; 4] = b"SGTM";
const FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum ParamsIoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt parameter file: {0}")]
    CorruptFile(String),
    #[error("incompatible parameter file: {0}")]
    VersionMismatch(String),
}

fn push_u32(buf: &mut Vec<u8>, v: u32) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_u64(buf: &mut Vec<u8>, v: u64) {
    buf.extend_from_slice(&v.to_le_bytes());
}

fn push_tensor(buf: &mut Vec<u8>, tensor: &[f64]) {
    for v in tensor {
        buf.extend_from_slice(&v.to_le_bytes());
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ParamsIoError> {
        if self.at + n > self.bytes.len() {
            return Err(ParamsIoError::CorruptFile("unexpected end of file".into()));
        }
        let slice = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32, ParamsIoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, ParamsIoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn tensor(&mut self, len: usize) -> Result<Vec<f64>, ParamsIoError> {
        let bytes = self.take(len * 8)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

/// Serialize parameters to a checksummed binary file.
pub fn save_params(params: &TaggerParams, path: &Path) -> Result<(), ParamsIoError> {
    let cfg = &params.config;
    let enc = &cfg.encoder;
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    push_u32(&mut buf, FORMAT_VERSION);
    push_u32(&mut buf, enc.embedding_dim as u32);
    push_u32(&mut buf, enc.context_window as u32);
    push_u32(&mut buf, enc.hidden_dim as u32);
    push_u64(&mut buf, enc.vocab_buckets as u64);
    push_u32(&mut buf, enc.max_positions as u32);
    push_u32(&mut buf, cfg.tag_classes as u32);
    push_u32(&mut buf, cfg.speaker_width as u32);

    push_tensor(&mut buf, &params.token_embeddings);
    push_tensor(&mut buf, &params.boundary_embedding);
    push_tensor(&mut buf, &params.position_embeddings);
    push_tensor(&mut buf, &params.mixer_weight);
    push_tensor(&mut buf, &params.mixer_bias);
    for head in [&params.head_sgt, &params.head_gd, &params.head_ged] {
        push_tensor(&mut buf, &head.weight);
        push_tensor(&mut buf, &head.bias);
    }

    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    fs::write(path, buf)?;
    Ok(())
}

/// Load parameters, verifying magic, version and checksum. The round trip
/// through [`save_params`] is bit-exact.
pub fn load_params(path: &Path) -> Result<TaggerParams, ParamsIoError> {
    let bytes = fs::read(path)?;
    if bytes.len() < MAGIC.len() + CHECKSUM_LEN {
        return Err(ParamsIoError::CorruptFile("file too short".into()));
    }
    let (body, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if &body[..4] != MAGIC {
        return Err(ParamsIoError::CorruptFile("bad magic".into()));
    }
    let digest = Sha256::digest(body);
    if digest.as_slice() != checksum {
        return Err(ParamsIoError::CorruptFile("checksum mismatch".into()));
    }

    let mut r = Reader { bytes: body, at: 4 };
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(ParamsIoError::VersionMismatch(format!(
            "format version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let embedding_dim = r.u32()? as usize;
    let context_window = r.u32()? as usize;
    let hidden_dim = r.u32()? as usize;
    let vocab_buckets = r.u64()? as usize;
    let max_positions = r.u32()? as usize;
    let tag_classes = r.u32()? as usize;
    let speaker_width = r.u32()? as usize;

    let config = ModelConfig {
        encoder: EncoderConfig {
            embedding_dim,
            context_window,
            hidden_dim,
            vocab_buckets,
            max_positions,
        },
        tag_classes,
        speaker_width,
    };
    config
        .validate()
        .map_err(|e| ParamsIoError::CorruptFile(format!("invalid stored config: {e}")))?;

    let concat = config.concat_dim();
    let params = TaggerParams {
        token_embeddings: r.tensor(vocab_buckets * embedding_dim)?,
        boundary_embedding: r.tensor(embedding_dim)?,
        position_embeddings: r.tensor(max_positions * embedding_dim)?,
        mixer_weight: r.tensor(context_window * embedding_dim * hidden_dim)?,
        mixer_bias: r.tensor(hidden_dim)?,
        head_sgt: Head { weight: r.tensor(concat * tag_classes)?, bias: r.tensor(tag_classes)? },
        head_gd: Head { weight: r.tensor(concat * 2)?, bias: r.tensor(2)? },
        head_ged: Head { weight: r.tensor(concat * 2)?, bias: r.tensor(2)? },
        config,
    };
    if r.at != body.len() {
        return Err(ParamsIoError::CorruptFile("trailing bytes after tensors".into()));
    }
    Ok(params)
}

/// Load parameters and require a specific head shape, for callers that have
/// already committed to a tag alphabet and speaker width.
pub fn load_params_expecting(
    path: &Path,
    tag_classes: usize,
    speaker_width: usize,
) -> Result<TaggerParams, ParamsIoError> {
    let params = load_params(path)?;
    if params.config.tag_classes != tag_classes {
        return Err(ParamsIoError::VersionMismatch(format!(
            "model was built with {} tag classes, expected {tag_classes}",
            params.config.tag_classes
        )));
    }
    if params.config.speaker_width != speaker_width {
        return Err(ParamsIoError::VersionMismatch(format!(
            "model was built with speaker width {}, expected {speaker_width}",
            params.config.speaker_width
        )));
    }
    Ok(params)
}
