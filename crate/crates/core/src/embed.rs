//! Subword-augmented skip-gram embeddings trained with negative sampling.
//!
//! A word's input representation is the mean of its own row and the rows of
//! its hashed character n-grams, taken from the angle-bracket padded form
//! `<word>` (the full padded string itself is not an n-gram). Out-of-vocabulary
//! words are composed from n-gram rows alone.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::math::{log_sigmoid, sigmoid};
use crate::rng::{self, ChaCha8Rng};
use crate::textproc::TokenList;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial step size, decayed linearly to zero over training.
    pub learning_rate: f64,
    pub min_count: u32,
    pub minn: usize,
    pub maxn: usize,
    pub bucket_count: usize,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dim: 64,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.05,
            min_count: 2,
            minn: 3,
            maxn: 6,
            bucket_count: 1 << 17,
            seed: 1,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(String::from(m)));
        if self.dim == 0 {
            return bad("embedding dim must be at least 1");
        }
        if self.window == 0 || self.negatives == 0 || self.epochs == 0 || self.min_count == 0 {
            return bad("window, negatives, epochs and min_count must be at least 1");
        }
        if self.minn == 0 || self.minn > self.maxn {
            return bad("n-gram lengths need 1 <= minn <= maxn");
        }
        if self.bucket_count == 0 {
            return bad("bucket_count must be at least 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning_rate must be positive");
        }
        Ok(())
    }
}

/// 32-bit FNV-1a over UTF-8 bytes.
pub fn fnv1a(s: &str) -> u32 {
    let mut h: u32 = 2_166_136_261;
    for b in s.bytes() {
        h ^= u32::from(b);
        h = h.wrapping_mul(16_777_619);
    }
    h
}

/// Character n-grams of `<word>` with lengths in `minn..=maxn`.
pub fn char_ngrams(word: &str, minn: usize, maxn: usize) -> Vec<String> {
    let padded: Vec<char> = core::iter::once('<').chain(word.chars()).chain(core::iter::once('>')).collect();
    let mut out = Vec::new();
    for start in 0..padded.len() {
        for n in minn..=maxn {
            if start + n > padded.len() || n == padded.len() {
                continue;
            }
            out.push(padded[start..start + n].iter().collect());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorSource {
    InVocab,
    /// Composed from n-grams only.
    Subword,
    /// OOV with no n-grams; the vector is all zeros.
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordVector {
    pub values: Vec<f64>,
    pub source: VectorSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    config: EmbeddingConfig,
    words: Vec<String>,
    counts: Vec<u64>,
    index: BTreeMap<String, u32>,
    /// `(words + bucket_count) x dim`, row-major.
    input: Vec<f32>,
    /// `words x dim`, row-major.
    output: Vec<f32>,
    /// Cached input rows per vocabulary word.
    word_rows: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingReport {
    /// Mean negative-sampling loss per (center, context) pair, per epoch.
    pub epoch_losses: Vec<f64>,
    pub pairs: u64,
}

/// Loss and gradients of one center word against its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub loss: f64,
    /// One gradient per input row (all rows share `grad_h / k`).
    pub d_inputs: Vec<Vec<f64>>,
    pub d_outputs: Vec<Vec<f64>>,
}

/// Forward/backward for a composed center vector `h` against output rows with
/// binary labels (1 = observed context, 0 = negative sample). Writes the
/// gradient with respect to `h` and to each output row; returns the loss
/// `-sum(log sigmoid(+-o.h))`.
fn forward_backward(h: &[f64], outputs: &[Vec<f64>], labels: &[bool], grad_h: &mut [f64], grad_out: &mut [Vec<f64>]) -> f64 {
    grad_h.iter_mut().for_each(|g| *g = 0.0);
    let mut loss = 0.0;
    for ((o, &label), go) in outputs.iter().zip(labels).zip(grad_out.iter_mut()) {
        let score = crate::math::dot(o, h);
        let (l, coef) = if label {
            (-log_sigmoid(score), sigmoid(score) - 1.0)
        } else {
            (-log_sigmoid(-score), sigmoid(score))
        };
        loss += l;
        for ((gh, oi), (g, hi)) in grad_h.iter_mut().zip(o).zip(go.iter_mut().zip(h)) {
            *gh += coef * oi;
            *g = coef * hi;
        }
    }
    loss
}

/// Negative-sampling loss as a function of the input rows composing the
/// center word and of the target output rows, with analytic gradients.
pub fn negative_sampling_loss(inputs: &[Vec<f64>], outputs: &[Vec<f64>], labels: &[bool]) -> LossGradient {
    let dim = inputs.first().map_or(0, Vec::len);
    let k = inputs.len() as f64;
    let mut h = vec![0.0; dim];
    for row in inputs {
        for (a, b) in h.iter_mut().zip(row) {
            *a += b / k;
        }
    }
    let mut grad_h = vec![0.0; dim];
    let mut d_outputs = vec![vec![0.0; dim]; outputs.len()];
    let loss = forward_backward(&h, outputs, labels, &mut grad_h, &mut d_outputs);
    let per_row: Vec<f64> = grad_h.iter().map(|g| g / k).collect();
    LossGradient {
        loss,
        d_inputs: vec![per_row; inputs.len()],
        d_outputs,
    }
}

/// Token ids of a document after dropping out-of-vocabulary words.
pub type EncodedDoc = Vec<u32>;

/// Span of the global linear learning-rate schedule covered by one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub progress_start: f64,
    pub progress_end: f64,
}

struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += crate::math::powf(c as f64, 0.75);
                acc
            })
            .collect();
        Sampler { cumulative }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u32 {
        let total = *self.cumulative.last().expect("non-empty vocabulary");
        let u = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1) as u32
    }
}

impl EmbeddingModel {
    /// Builds the vocabulary and randomly initialized parameters. Input rows
    /// are uniform in `[-1/dim, 1/dim]`; output rows start at zero.
    pub fn initialize(docs: &[TokenList], config: &EmbeddingConfig) -> Result<Self> {
        config.validate()?;
        let mut freq: BTreeMap<&str, u64> = BTreeMap::new();
        for tok in docs.iter().flatten() {
            *freq.entry(tok.as_str()).or_insert(0) += 1;
        }
        let mut vocab: Vec<(&str, u64)> =
            freq.into_iter().filter(|&(_, c)| c >= u64::from(config.min_count)).collect();
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary(config.min_count));
        }
        vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

        let words: Vec<String> = vocab.iter().map(|(w, _)| String::from(*w)).collect();
        let counts: Vec<u64> = vocab.iter().map(|v| v.1).collect();
        let dim = config.dim;
        let mut rng = rng::seeded(config.seed);
        let bound = 1.0 / dim as f32;
        let input: Vec<f32> = (0..(words.len() + config.bucket_count) * dim)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        let output = vec![0.0f32; words.len() * dim];
        Self::from_parts(config.clone(), words, counts, input, output)
    }

    /// Reassembles a model from its parameters, checking every shape.
    pub fn from_parts(config: EmbeddingConfig, words: Vec<String>, counts: Vec<u64>, input: Vec<f32>, output: Vec<f32>) -> Result<Self> {
        config.validate()?;
        let dim = config.dim;
        if counts.len() != words.len() {
            return Err(Error::DimensionMismatch {
                left: words.len(),
                right: counts.len(),
            });
        }
        if input.len() != (words.len() + config.bucket_count) * dim {
            return Err(Error::DimensionMismatch {
                left: (words.len() + config.bucket_count) * dim,
                right: input.len(),
            });
        }
        if output.len() != words.len() * dim {
            return Err(Error::DimensionMismatch {
                left: words.len() * dim,
                right: output.len(),
            });
        }
        let index: BTreeMap<String, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        if index.len() != words.len() {
            return Err(Error::InvalidRecord(String::from("duplicate word in embedding vocabulary")));
        }
        let mut model = EmbeddingModel {
            config,
            words,
            counts,
            index,
            input,
            output,
            word_rows: Vec::new(),
        };
        model.word_rows = (0..model.words.len())
            .map(|i| {
                let mut rows = vec![i];
                rows.extend(model.subword_rows(&model.words[i]));
                rows
            })
            .collect();
        Ok(model)
    }

    pub fn config(&self) -> &EmbeddingConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn input_matrix(&self) -> &[f32] {
        &self.input
    }

    pub fn output_matrix(&self) -> &[f32] {
        &self.output
    }

    pub fn word_id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    fn subword_rows(&self, word: &str) -> Vec<usize> {
        let offset = self.words.len();
        let buckets = self.config.bucket_count as u32;
        char_ngrams(word, self.config.minn, self.config.maxn)
            .iter()
            .map(|g| offset + (fnv1a(g) % buckets) as usize)
            .collect()
    }

    /// Input rows whose mean represents `word`.
    pub fn input_rows(&self, word: &str) -> Vec<usize> {
        match self.word_id(word) {
            Some(id) => self.word_rows[id as usize].clone(),
            None => self.subword_rows(word),
        }
    }

    fn row(&self, r: usize) -> &[f32] {
        &self.input[r * self.config.dim..(r + 1) * self.config.dim]
    }

    pub fn lookup(&self, word: &str) -> WordVector {
        let rows = self.input_rows(word);
        let mut values = vec![0.0; self.config.dim];
        if rows.is_empty() {
            return WordVector {
                values,
                source: VectorSource::Empty,
            };
        }
        for &r in &rows {
            for (v, &x) in values.iter_mut().zip(self.row(r)) {
                *v += f64::from(x);
            }
        }
        let k = rows.len() as f64;
        values.iter_mut().for_each(|v| *v /= k);
        let source = if self.word_id(word).is_some() {
            VectorSource::InVocab
        } else {
            VectorSource::Subword
        };
        WordVector { values, source }
    }

    pub fn word_vector(&self, word: &str) -> Vec<f64> {
        self.lookup(word).values
    }

    /// Element-wise mean of token vectors; zeros for an empty list.
    pub fn doc_vector(&self, tokens: &[String]) -> Vec<f64> {
        let mut out = vec![0.0; self.config.dim];
        if tokens.is_empty() {
            return out;
        }
        for tok in tokens {
            for (o, v) in out.iter_mut().zip(self.word_vector(tok)) {
                *o += v;
            }
        }
        let n = tokens.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
        out
    }

    pub fn encode(&self, docs: &[TokenList]) -> Vec<EncodedDoc> {
        docs.iter()
            .map(|d| d.iter().filter_map(|t| self.word_id(t)).collect())
            .collect()
    }

    /// One sequential pass of skip-gram updates over `docs`, always in the
    /// given order. Returns the summed loss and the number of pairs.
    pub fn train_pass(&mut self, docs: &[EncodedDoc], rng: &mut ChaCha8Rng, schedule: Schedule) -> (f64, u64) {
        let dim = self.config.dim;
        let sampler = Sampler::new(&self.counts);
        let total_tokens: usize = docs.iter().map(Vec::len).sum();
        let span = schedule.progress_end - schedule.progress_start;
        let targets = self.config.negatives + 1;

        let mut h = vec![0.0; dim];
        let mut grad_h = vec![0.0; dim];
        let mut outs = vec![vec![0.0; dim]; targets];
        let mut grad_out = vec![vec![0.0; dim]; targets];
        let mut ids = vec![0u32; targets];
        let mut labels = vec![false; targets];
        labels[0] = true;

        let mut seen = 0usize;
        let mut loss_sum = 0.0;
        let mut pairs = 0u64;
        for doc in docs {
            for (pos, &center) in doc.iter().enumerate() {
                let progress = schedule.progress_start + span * seen as f64 / total_tokens.max(1) as f64;
                let lr = self.config.learning_rate * (1.0 - progress).max(0.0);
                seen += 1;
                let reach = rng.gen_range(1..=self.config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(doc.len() - 1);

                let rows = core::mem::take(&mut self.word_rows[center as usize]);
                let k = rows.len() as f64;
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    h.iter_mut().for_each(|x| *x = 0.0);
                    for &r in &rows {
                        for (a, &b) in h.iter_mut().zip(&self.input[r * dim..(r + 1) * dim]) {
                            *a += f64::from(b) / k;
                        }
                    }
                    let positive = doc[ctx_pos];
                    ids[0] = positive;
                    for slot in ids.iter_mut().skip(1) {
                        let mut neg = sampler.draw(rng);
                        for _ in 0..10 {
                            if neg != positive {
                                break;
                            }
                            neg = sampler.draw(rng);
                        }
                        *slot = neg;
                    }
                    for (o, &id) in outs.iter_mut().zip(&ids) {
                        let src = &self.output[id as usize * dim..(id as usize + 1) * dim];
                        for (a, &b) in o.iter_mut().zip(src) {
                            *a = f64::from(b);
                        }
                    }
                    loss_sum += forward_backward(&h, &outs, &labels, &mut grad_h, &mut grad_out);
                    pairs += 1;
                    for (g, &id) in grad_out.iter().zip(&ids) {
                        let dst = &mut self.output[id as usize * dim..(id as usize + 1) * dim];
                        for (a, &b) in dst.iter_mut().zip(g) {
                            *a -= (lr * b) as f32;
                        }
                    }
                    for &r in &rows {
                        for (a, &b) in self.input[r * dim..(r + 1) * dim].iter_mut().zip(&grad_h) {
                            *a -= (lr * b / k) as f32;
                        }
                    }
                }
                self.word_rows[center as usize] = rows;
            }
        }
        (loss_sum, pairs)
    }

    /// Replaces parameters with the element-wise mean over `models` (which
    /// must share this model's vocabulary and shape).
    pub fn average_from(&mut self, models: &[EmbeddingModel]) -> Result<()> {
        if models.is_empty() {
            return Ok(());
        }
        for m in models {
            if m.words != self.words || m.input.len() != self.input.len() {
                return Err(Error::DimensionMismatch {
                    left: self.input.len(),
                    right: m.input.len(),
                });
            }
        }
        let n = models.len() as f64;
        for (i, v) in self.input.iter_mut().enumerate() {
            *v = (models.iter().map(|m| f64::from(m.input[i])).sum::<f64>() / n) as f32;
        }
        for (i, v) in self.output.iter_mut().enumerate() {
            *v = (models.iter().map(|m| f64::from(m.output[i])).sum::<f64>() / n) as f32;
        }
        Ok(())
    }
}

/// Deterministic single-threaded training: fixed document order and one
/// seeded random stream.
pub fn train_embeddings(docs: &[TokenList], config: &EmbeddingConfig) -> Result<(EmbeddingModel, TrainingReport)> {
    let mut model = EmbeddingModel::initialize(docs, config)?;
    let encoded = model.encode(docs);
    let mut rng = rng::stream(config.seed, 1);
    let mut report = TrainingReport::default();
    let epochs = config.epochs as f64;
    for epoch in 0..config.epochs {
        let schedule = Schedule {
            progress_start: epoch as f64 / epochs,
            progress_end: (epoch + 1) as f64 / epochs,
        };
        let (loss, pairs) = model.train_pass(&encoded, &mut rng, schedule);
        report.epoch_losses.push(crate::math::ratio(loss, pairs as f64));
        report.pairs += pairs;
    }
    Ok((model, report))
}

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let nu = crate::math::sqrt(crate::math::dot(u, u));
    let nv = crate::math::sqrt(crate::math::dot(v, v));
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((crate::math::dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

pub fn centroid(model: &EmbeddingModel, docs: &[TokenList]) -> Vec<f64> {
    let mut out = vec![0.0; model.dim()];
    for d in docs {
        for (o, v) in out.iter_mut().zip(model.doc_vector(d)) {
            *o += v;
        }
    }
    let n = docs.len().max(1) as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub names: Vec<String>,
    /// Row-major `names.len()` squared cosines.
    pub values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.names.len() + j]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Pairwise cosine similarity of corpus centroids.
pub fn similarity_report(model: &EmbeddingModel, corpora: &[(String, Vec<TokenList>)]) -> Result<SimilarityMatrix> {
    let mut centroids = Vec::with_capacity(corpora.len());
    for (name, docs) in corpora {
        if docs.is_empty() {
            return Err(Error::EmptyCorpus(name.clone()));
        }
        centroids.push(centroid(model, docs));
    }
    let n = corpora.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let c = cosine(&centroids[i], &centroids[j])?;
            values[i * n + j] = c;
            values[j * n + i] = c;
        }
    }
    Ok(SimilarityMatrix {
        names: corpora.iter().map(|c| c.0.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;

    fn small_config() -> EmbeddingConfig {
        EmbeddingConfig {
            dim: 16,
            window: 2,
            negatives: 3,
            epochs: 5,
            min_count: 1,
            bucket_count: 1024,
            ..EmbeddingConfig::default()
        }
    }

    fn docs(lines: &[&str]) -> Vec<TokenList> {
        lines.iter().map(|l| l.split_whitespace().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn ngrams_exclude_full_word() {
        assert_eq!(char_ngrams("ab", 3, 3), ["<ab", "ab>"]);
        assert!(char_ngrams("a", 3, 6).is_empty());
        assert_eq!(char_ngrams("abc", 3, 4), ["<ab", "<abc", "abc", "abc>", "bc>"]);
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(""), 0x811c_9dc5);
        assert_eq!(fnv1a("a"), 0xe40c_292c);
        assert_eq!(fnv1a("foobar"), 0xbf9c_f968);
    }

    #[test]
    fn config_validation() {
        assert!(EmbeddingConfig::default().validate().is_ok());
        assert!(EmbeddingConfig { dim: 0, ..EmbeddingConfig::default() }.validate().is_err());
        assert!(EmbeddingConfig { minn: 5, maxn: 4, ..EmbeddingConfig::default() }.validate().is_err());
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let cfg = EmbeddingConfig { min_count: 3, ..small_config() };
        assert_eq!(
            train_embeddings(&docs(&["a b c"]), &cfg).unwrap_err(),
            Error::EmptyVocabulary(3)
        );
    }

    #[test]
    fn vectors_have_expected_shape_and_sources() {
        let (model, _) = train_embeddings(&docs(&["alpha beta gamma", "beta gamma delta"]), &small_config()).unwrap();
        let v = model.lookup("beta");
        assert_eq!(v.source, VectorSource::InVocab);
        assert_eq!(v.values.len(), 16);
        assert!(v.values.iter().all(|x| x.is_finite()));

        let oov = model.lookup("alphabet");
        assert_eq!(oov.source, VectorSource::Subword);
        assert!(oov.values.iter().any(|&x| x != 0.0));

        let empty = model.lookup("z");
        assert_eq!(empty.source, VectorSource::Empty);
        assert!(empty.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn doc_vector_is_mean_of_word_vectors() {
        let (model, _) = train_embeddings(&docs(&["red green blue", "green blue red"]), &small_config()).unwrap();
        assert_eq!(model.doc_vector(&[]), vec![0.0; 16]);
        let single = vec!["red".to_string()];
        assert_eq!(model.doc_vector(&single), model.word_vector("red"));
        let pair = vec!["red".to_string(), "blue".to_string()];
        let a = model.word_vector("red");
        let b = model.word_vector("blue");
        for (got, (x, y)) in model.doc_vector(&pair).iter().zip(a.iter().zip(&b)) {
            assert!((got - (x + y) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cosine_cases() {
        assert!((cosine(&[1.0, 2.0], &[2.0, 1.0]).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[3.0, -4.0], &[3.0, -4.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut r = rng::seeded(7);
        let dim = 6;
        let mut draw = |n: usize| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..dim).map(|_| r.gen_range(-0.8..0.8)).collect()).collect()
        };
        let inputs = draw(4);
        let outputs = draw(3);
        let labels = [true, false, false];
        let analytic = negative_sampling_loss(&inputs, &outputs, &labels);
        let eps = 1e-6;
        let rel = |a: f64, n: f64| (a - n).abs() / (a.abs() + n.abs()).max(1e-8);
        for i in 0..inputs.len() {
            for j in 0..dim {
                let mut plus = inputs.clone();
                plus[i][j] += eps;
                let mut minus = inputs.clone();
                minus[i][j] -= eps;
                let numeric = (negative_sampling_loss(&plus, &outputs, &labels).loss
                    - negative_sampling_loss(&minus, &outputs, &labels).loss)
                    / (2.0 * eps);
                assert!(rel(analytic.d_inputs[i][j], numeric) < 1e-4, "input {i},{j}");
            }
        }
        for i in 0..outputs.len() {
            for j in 0..dim {
                let mut plus = outputs.clone();
                plus[i][j] += eps;
                let mut minus = outputs.clone();
                minus[i][j] -= eps;
                let numeric = (negative_sampling_loss(&inputs, &plus, &labels).loss
                    - negative_sampling_loss(&inputs, &minus, &labels).loss)
                    / (2.0 * eps);
                assert!(rel(analytic.d_outputs[i][j], numeric) < 1e-4, "output {i},{j}");
            }
        }
    }

    #[test]
    fn similarity_matrix_contract() {
        let corpus = docs(&["one two three", "two three four"]);
        let (model, _) = train_embeddings(&corpus, &small_config()).unwrap();
        let named = vec![("a".to_string(), corpus.clone()), ("b".to_string(), docs(&["four one"]))];
        let m = similarity_report(&model, &named).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(0, 1), m.get(1, 0));
        let bad = vec![("empty".to_string(), Vec::new())];
        assert_eq!(similarity_report(&model, &bad).unwrap_err(), Error::EmptyCorpus("empty".into()));
        let _ = format!("{}", 1);
    }
}
