//! Thread-level parallelism for forest fitting and embedding training.
//!
//! Per-tree and per-shard random streams make forest results independent of
//! the worker count. Sharded embedding training is not: it averages shard
//! models after each epoch, so deterministic mode always uses one shard.

use std::thread;

use biasline_core::embed::{EmbeddingConfig, EmbeddingModel, Schedule, TrainingReport};
use biasline_core::ml::{check_trainable, fit, Dataset, Model, ModelParams, ModelSpec, RandomForest, TrainedModel};
use biasline_core::rng;
use biasline_core::textproc::TokenList;

use crate::error::{Context, Result};

pub const THREADS_VAR: &str = "BIASLINE_THREADS";

/// Worker count: 1 in deterministic mode, otherwise `BIASLINE_THREADS` or the
/// available parallelism.
pub fn worker_count(deterministic: bool) -> usize {
    if deterministic {
        return 1;
    }
    let available = thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(n) if n >= 1 => n,
        _ => available,
    }
}

/// Applies `f` to every index in `0..n` on up to `workers` threads and
/// returns results in index order.
pub fn map_indexed<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, n.max(1));
    if workers == 1 {
        return (0..n).map(f).collect();
    }
    let f = &f;
    let mut out: Vec<(usize, T)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| s.spawn(move || (w..n).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, v)| v).collect()
}

/// Same result as [`biasline_core::ml::fit`]; forests spread trees over
/// `workers` threads.
pub fn fit_model_core(spec: &ModelSpec, data: &Dataset, workers: usize) -> biasline_core::Result<TrainedModel> {
    match &spec.params {
        ModelParams::RandomForest(p) if workers > 1 => {
            p.validate()?;
            check_trainable(&spec.params, data)?;
            let trees = map_indexed(p.n_trees, workers, |i| RandomForest::fit_tree(&data.x, &data.y, p, spec.seed, i))
                .into_iter()
                .collect::<biasline_core::Result<Vec<_>>>()?;
            let forest = RandomForest::from_trees(trees)?;
            Ok(TrainedModel::new(Model::RandomForest(forest), data.feature_names.clone()))
        }
        _ => fit(spec, data),
    }
}

pub fn fit_model(spec: &ModelSpec, data: &Dataset, workers: usize) -> Result<TrainedModel> {
    fit_model_core(spec, data, workers).context(&format!("fitting {}", spec.kind_name()))
}

/// Embedding training. With one worker this is the core deterministic
/// trainer; with more, each epoch trains `workers` copies on contiguous
/// document shards and averages them.
pub fn train_embeddings(docs: &[TokenList], config: &EmbeddingConfig, workers: usize) -> Result<(EmbeddingModel, TrainingReport)> {
    if workers <= 1 || docs.len() < 2 {
        return biasline_core::embed::train_embeddings(docs, config).context("embedding training");
    }
    let mut model = EmbeddingModel::initialize(docs, config).context("embedding training")?;
    let encoded = model.encode(docs);
    let shards = workers.min(encoded.len());
    let chunk = encoded.len().div_ceil(shards);
    let parts: Vec<&[Vec<u32>]> = encoded.chunks(chunk).collect();
    let mut report = TrainingReport::default();
    let epochs = config.epochs as f64;
    for epoch in 0..config.epochs {
        let schedule = Schedule {
            progress_start: epoch as f64 / epochs,
            progress_end: (epoch + 1) as f64 / epochs,
        };
        let base = &model;
        let results = map_indexed(parts.len(), parts.len(), |s| {
            let mut local = base.clone();
            let mut r = rng::stream(config.seed, 1 + (epoch * parts.len() + s) as u64);
            let (loss, pairs) = local.train_pass(parts[s], &mut r, schedule);
            (local, loss, pairs)
        });
        let loss: f64 = results.iter().map(|r| r.1).sum();
        let pairs: u64 = results.iter().map(|r| r.2).sum();
        let locals: Vec<EmbeddingModel> = results.into_iter().map(|r| r.0).collect();
        model.average_from(&locals).context("embedding training")?;
        report.epoch_losses.push(if pairs == 0 { 0.0 } else { loss / pairs as f64 });
        report.pairs += pairs;
    }
    Ok((model, report))
}
