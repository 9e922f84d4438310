//! Binary embedding model file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "BLEM" | version u32 | dim u32 | minn u32 | maxn u32 | bucket_count u32 | vocab_size u32
//! window u32 | negatives u32 | epochs u32 | min_count u32 | learning_rate f64 | seed u64
//! vocab_size x (byte_len u32, utf-8 bytes, count u64)
//! input rows  ((vocab_size + bucket_count) x dim f32, row-major)
//! output rows (vocab_size x dim f32, row-major)
//! ```

use std::path::Path;

use biasline_core::embed::{EmbeddingConfig, EmbeddingModel};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"BLEM";
pub const VERSION: u32 = 1;

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

pub fn encode_model(model: &EmbeddingModel) -> Vec<u8> {
    let cfg = model.config();
    let mut out = Vec::with_capacity(64 + 4 * (model.input_matrix().len() + model.output_matrix().len()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for v in [cfg.dim, cfg.minn, cfg.maxn, cfg.bucket_count, model.words().len()] {
        put_u32(&mut out, v);
    }
    for v in [cfg.window, cfg.negatives, cfg.epochs, cfg.min_count as usize] {
        put_u32(&mut out, v);
    }
    out.extend_from_slice(&cfg.learning_rate.to_le_bytes());
    out.extend_from_slice(&cfg.seed.to_le_bytes());
    for (w, &c) in model.words().iter().zip(model.counts()) {
        put_u32(&mut out, w.len());
        out.extend_from_slice(w.as_bytes());
        out.extend_from_slice(&c.to_le_bytes());
    }
    for v in model.input_matrix().iter().chain(model.output_matrix()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format!("truncated model file at byte {}", self.pos))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<usize, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> std::result::Result<Vec<f32>, String> {
        let raw = self.take(n.checked_mul(4).ok_or("matrix size overflow")?)?;
        Ok(raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn decode_model(bytes: &[u8]) -> std::result::Result<EmbeddingModel, String> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err("not a model file (bad magic)".into());
    }
    let version = r.u32()?;
    if version != VERSION as usize {
        return Err(format!("unsupported model version {version}"));
    }
    let (dim, minn, maxn, bucket_count, vocab) = (r.u32()?, r.u32()?, r.u32()?, r.u32()?, r.u32()?);
    let (window, negatives, epochs, min_count) = (r.u32()?, r.u32()?, r.u32()?, r.u32()?);
    let learning_rate = f64::from_bits(r.u64()?);
    let seed = r.u64()?;
    let mut words = Vec::with_capacity(vocab.min(1 << 20));
    let mut counts = Vec::with_capacity(vocab.min(1 << 20));
    for _ in 0..vocab {
        let len = r.u32()?;
        let w = std::str::from_utf8(r.take(len)?).map_err(|_| "vocabulary entry is not utf-8".to_string())?;
        words.push(w.to_string());
        counts.push(r.u64()?);
    }
    let input = r.f32s((vocab + bucket_count) * dim)?;
    let output = r.f32s(vocab * dim)?;
    if r.pos != bytes.len() {
        return Err(format!("{} trailing bytes after model data", bytes.len() - r.pos));
    }
    let config = EmbeddingConfig {
        dim,
        window,
        negatives,
        epochs,
        learning_rate,
        min_count: min_count as u32,
        minn,
        maxn,
        bucket_count,
        seed,
    };
    EmbeddingModel::from_parts(config, words, counts, input, output).map_err(|e| e.to_string())
}

pub fn save_model(model: &EmbeddingModel, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<EmbeddingModel> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    })
}
