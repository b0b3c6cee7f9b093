//! Binary checkpoints.
//!
//! Layout: the 8-byte magic `WGCKPT01`, a little-endian `u64` manifest
//! length, a JSON manifest, then every tensor as little-endian IEEE-754 `f64`
//! in manifest order. Values round-trip bit-exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::char_encoder::CharVocab;
use crate::combinators::CombinationMethod;
use crate::data::WordVocab;
use crate::error::{Error, Result};
use crate::model::{Model, ModelDims};
use crate::rng::SeededRng;

const MAGIC: &[u8; 8] = b"WGCKPT01";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct DimsRecord {
    word_dim: usize,
    char_dim: usize,
    char_hidden: usize,
    sentence_dim: usize,
    classifier_hidden: usize,
}

#[derive(Serialize, Deserialize)]
struct TensorRecord {
    name: String,
    shape: Vec<usize>,
    offset: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    method: String,
    dims: DimsRecord,
    lowercase: bool,
    word_min_freq: u64,
    word_vocab: Vec<(String, u64)>,
    word_vocab_sha256: String,
    char_vocab: String,
    char_vocab_sha256: String,
    tensors: Vec<TensorRecord>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn encode(model: &Model) -> Result<Vec<u8>> {
    let named = model.named_tensors();
    let mut offset = 0;
    let tensors = named
        .iter()
        .map(|(name, t)| {
            let rec = TensorRecord {
                name: name.clone(),
                shape: t.shape().to_vec(),
                offset,
            };
            offset += t.len();
            rec
        })
        .collect();
    let char_vocab: String = model.char_vocab.chars().iter().collect();
    let d = model.dims;
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        method: model.method.abbrev().to_string(),
        dims: DimsRecord {
            word_dim: d.word_dim,
            char_dim: d.char_dim,
            char_hidden: d.char_hidden,
            sentence_dim: d.sentence_dim,
            classifier_hidden: d.classifier_hidden,
        },
        lowercase: model.lowercase,
        word_min_freq: model.word_vocab.min_freq(),
        word_vocab: model.word_vocab.entries().map(|(w, c)| (w.to_string(), c)).collect(),
        word_vocab_sha256: model.word_vocab.fingerprint(),
        char_vocab_sha256: sha256_hex(char_vocab.as_bytes()),
        char_vocab,
        tensors,
    };
    let json = serde_json::to_vec(&manifest).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut out = Vec::with_capacity(16 + json.len() + offset * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for (_, t) in &named {
        for v in t.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

/// Writes `model` to `path` through a temporary sibling file and a rename.
pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(model)?;
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        Error::Checkpoint(msg) => Error::Checkpoint(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn decode(bytes: &[u8]) -> Result<Model> {
    let bad = |msg: &str| Error::Checkpoint(msg.to_string());
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(bad("not a checkpoint file (bad magic)"));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = bytes.get(16..16 + len).ok_or_else(|| bad("truncated manifest"))?;
    let m: Manifest = serde_json::from_slice(body).map_err(|e| Error::Checkpoint(format!("bad manifest: {e}")))?;
    if m.format_version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported format version {}",
            m.format_version
        )));
    }
    let method: CombinationMethod = m.method.parse()?;
    let dims = ModelDims {
        word_dim: m.dims.word_dim,
        char_dim: m.dims.char_dim,
        char_hidden: m.dims.char_hidden,
        sentence_dim: m.dims.sentence_dim,
        classifier_hidden: m.dims.classifier_hidden,
    };
    let word_vocab = WordVocab::from_counts(m.word_vocab, m.word_min_freq);
    if word_vocab.fingerprint() != m.word_vocab_sha256 {
        return Err(bad("word vocabulary hash mismatch"));
    }
    if sha256_hex(m.char_vocab.as_bytes()) != m.char_vocab_sha256 {
        return Err(bad("character vocabulary hash mismatch"));
    }
    let char_vocab = CharVocab::from_chars(m.char_vocab.chars());

    let mut model = Model::new(
        method,
        dims,
        word_vocab,
        char_vocab,
        m.lowercase,
        None,
        &mut SeededRng::new(0),
    )?;
    let expected: Vec<(String, Vec<usize>)> = model
        .named_tensors()
        .into_iter()
        .map(|(n, t)| (n, t.shape().to_vec()))
        .collect();
    if expected.len() != m.tensors.len() {
        return Err(Error::Checkpoint(format!(
            "expected {} tensors, manifest lists {}",
            expected.len(),
            m.tensors.len()
        )));
    }
    let payload = &bytes[16 + len..];
    let total: usize = expected.iter().map(|(_, s)| s.iter().product::<usize>()).sum();
    if payload.len() != total * 8 {
        return Err(Error::Checkpoint(format!(
            "payload holds {} bytes, expected {}",
            payload.len(),
            total * 8
        )));
    }
    for ((t, rec), (name, shape)) in model.tensors_mut().into_iter().zip(&m.tensors).zip(&expected) {
        if &rec.name != name || &rec.shape != shape {
            return Err(Error::Checkpoint(format!(
                "tensor `{}` {:?} does not match expected `{name}` {shape:?}",
                rec.name, rec.shape
            )));
        }
        let start = rec.offset * 8;
        let chunk = payload
            .get(start..start + t.len() * 8)
            .ok_or_else(|| Error::Checkpoint(format!("tensor `{name}` out of bounds")))?;
        for (dst, src) in t.data_mut().iter_mut().zip(chunk.chunks_exact(8)) {
            *dst = f64::from_le_bytes(src.try_into().expect("8 bytes"));
            if !dst.is_finite() {
                return Err(Error::Checkpoint(format!("tensor `{name}` holds a non-finite value")));
            }
        }
    }
    Ok(model)
}
