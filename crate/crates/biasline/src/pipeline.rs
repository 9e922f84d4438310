//! Subcommand implementations. Each `cmd_*` loads what it needs from the
//! config, runs the core stages and writes its reports under `out_dir`. The
//! stage functions without the `cmd_` prefix return in-memory results.

use std::fmt::Write as _;
use std::path::PathBuf;

use biasline_core::bias::{binarize, corpus_summary, BiasScorer};
use biasline_core::cascade::{
    assemble_forecast_dataset, build_cascades, score_bias, theta, Annotator, Cascade, Exclusion, FeatureContext, FeatureSet,
    ForecastDataset,
};
use biasline_core::corpus::{media_bias_histogram, posts_per_day, Party, Post, Speech};
use biasline_core::embed::{similarity_report, EmbeddingModel, SimilarityMatrix, TrainingReport};
use biasline_core::ml::{evaluate, transfer_protocol_with, Dataset, Matrix, ModelSpec, TransferRow};
use biasline_core::rng;
use biasline_core::synth::{generate, SyntheticCorpus};
use biasline_core::textproc::{preprocess, style_features, EntityExtractor, SentimentLexicon, StyleFeatures, Stopwords, TokenList};
use biasline_core::tfidf::{build_vocab, compute_party_tfidf, PartyTfidf};
use serde::Serialize;

use crate::config::{PipelineConfig, Protocol, SpeechLabel};
use crate::error::{Context, Error, Result};
use crate::io::{self, load_posts, load_speeches, write_text};
use crate::model_io::{load_model, save_model};
use crate::parallel::{fit_model_core, map_indexed, train_embeddings, worker_count};
use crate::report::{
    jsonl, metrics_jsonl, metrics_table, similarity_csv, similarity_jsonl, similarity_table, summary_table, ForumSummary,
};

/// Files written and non-fatal warnings raised by a subcommand.
#[derive(Debug, Default)]
pub struct Outputs {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

impl Outputs {
    fn write(&mut self, cfg: &PipelineConfig, name: &str, contents: &str) -> Result<()> {
        let path = cfg.out_path(name);
        write_text(&path, contents)?;
        self.files.push(path);
        Ok(())
    }
}

pub struct Resources {
    pub stopwords: Stopwords,
    pub lexicon: SentimentLexicon,
    pub extractor: EntityExtractor,
}

pub fn resources(cfg: &PipelineConfig) -> Result<Resources> {
    let stopwords = match cfg.optional(&cfg.paths.stopwords, "stopwords")? {
        Some(p) => io::load_stopwords(&p)?,
        None => Stopwords::english(),
    };
    let negators = cfg.optional(&cfg.paths.negators, "negators")?;
    let lexicon = match cfg.optional(&cfg.paths.lexicon, "lexicon")? {
        Some(p) => io::load_lexicon(&p, negators.as_deref())?,
        None => SentimentLexicon::builtin(),
    };
    let mut extractor = EntityExtractor::new(stopwords.clone());
    if let Some(p) = cfg.optional(&cfg.paths.gazetteer, "gazetteer")? {
        extractor = extractor.with_gazetteer(io::read_word_list(&p)?);
    }
    Ok(Resources {
        stopwords,
        lexicon,
        extractor,
    })
}

pub fn speeches(cfg: &PipelineConfig, out: &mut Outputs) -> Result<Vec<Speech>> {
    let path = cfg.require(&cfg.paths.speeches, "speeches")?;
    let loaded = load_speeches(&path, cfg.load_mode)?;
    out.warnings.extend(loaded.warnings);
    Ok(loaded.records)
}

/// Posts per configured forum, in forum-name order.
pub fn forums(cfg: &PipelineConfig, out: &mut Outputs) -> Result<Vec<(String, Vec<Post>)>> {
    let paths = cfg.forum_paths()?;
    if paths.is_empty() {
        return Err(Error::Config("paths.posts lists no forums".into()));
    }
    paths
        .into_iter()
        .map(|(name, p)| {
            let loaded = load_posts(&p, cfg.load_mode)?;
            out.warnings.extend(loaded.warnings);
            Ok((name, loaded.records))
        })
        .collect()
}

/// Entity vocabulary from all posts, weighted by the speech corpora.
pub fn party_tfidf(cfg: &PipelineConfig, res: &Resources, speeches: &[Speech], posts: &[Post]) -> Result<PartyTfidf> {
    let vocab = build_vocab(posts, &res.extractor, cfg.entities.min_forum_freq).context("building entity vocabulary")?;
    compute_party_tfidf(speeches, &vocab, &res.stopwords).context("computing party TF-IDF")
}

pub fn scorer(cfg: &PipelineConfig, res: &Resources, speeches: &[Speech], posts: &[Post]) -> Result<BiasScorer> {
    Ok(BiasScorer {
        extractor: res.extractor.clone(),
        weights: party_tfidf(cfg, res, speeches, posts)?,
        normalization: cfg.entities.normalization,
    })
}

/// The configured pretrained model, or one trained on `docs`.
pub fn embeddings(cfg: &PipelineConfig, docs: &[TokenList]) -> Result<(EmbeddingModel, Option<TrainingReport>)> {
    if let Some(p) = cfg.optional(&cfg.paths.model, "model")? {
        return Ok((load_model(&p)?, None));
    }
    let (model, report) = train_embeddings(docs, &cfg.embedding_config(), worker_count(cfg.deterministic))?;
    Ok((model, Some(report)))
}

fn flatten(forums: &[(String, Vec<Post>)]) -> Vec<Post> {
    forums.iter().flat_map(|f| f.1.iter().cloned()).collect()
}

fn party_docs(speeches: &[Speech], party: Party, sw: &Stopwords) -> Vec<TokenList> {
    speeches.iter().filter(|s| s.party == party).map(|s| preprocess(&s.text, sw)).collect()
}

fn post_docs(posts: &[Post], sw: &Stopwords) -> Vec<TokenList> {
    posts.iter().map(|p| preprocess(&p.text, sw)).collect()
}

// ---- label ----

pub fn cmd_label(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let res = resources(cfg)?;
    let speeches = speeches(cfg, &mut out)?;
    let forums = forums(cfg, &mut out)?;
    let media = cfg.optional(&cfg.paths.media_bias, "media_bias")?.map(|p| io::load_media_bias(&p)).transpose()?;
    let scorer = scorer(cfg, &res, &speeches, &flatten(&forums))?;

    let mut labels = String::from("post_id\tgamma\tlabel\tn_entities\n");
    let mut summaries = Vec::new();
    let mut days = String::from("forum,date,posts\n");
    let mut media_csv = String::from("forum,bucket,posts\n");
    for (name, posts) in &forums {
        let mut gammas = Vec::new();
        for p in posts {
            let s = scorer.score(&p.text);
            let _ = writeln!(labels, "{}\t{}\t{}\t{}", p.id, s.gamma, s.label().value(), s.n_entities);
            if s.is_scoreable() {
                gammas.push(s.gamma);
            }
        }
        match corpus_summary(&gammas) {
            Ok(s) => summaries.push(ForumSummary::new(name, posts.len(), &s)),
            Err(_) => out.warnings.push(format!("forum {name}: no post has a scoreable entity")),
        }
        for (date, n) in posts_per_day(posts) {
            let _ = writeln!(days, "{name},{date},{n}");
        }
        if let Some(table) = &media {
            for (bucket, n) in media_bias_histogram(posts, table) {
                let _ = writeln!(media_csv, "{name},{},{n}", bucket.name());
            }
        }
    }
    out.write(cfg, "labels.tsv", &labels)?;
    out.write(cfg, "summary.txt", &summary_table(&summaries))?;
    out.write(cfg, "summary.jsonl", &jsonl(&summaries))?;
    out.write(cfg, "posts_per_day.csv", &days)?;
    if media.is_some() {
        out.write(cfg, "media_bias.csv", &media_csv)?;
    }
    Ok(out)
}

// ---- tfidf ----

pub fn cmd_tfidf(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let res = resources(cfg)?;
    let speeches = speeches(cfg, &mut out)?;
    let forums = forums(cfg, &mut out)?;
    let w = party_tfidf(cfg, &res, &speeches, &flatten(&forums))?;
    let mut tsv = String::from("entity\ttf_d\ttf_r\tidf\n");
    for (e, idf) in &w.idf {
        let _ = writeln!(tsv, "{e}\t{}\t{}\t{idf}", w.tf_d[e], w.tf_r[e]);
    }
    out.write(cfg, "tfidf.tsv", &tsv)?;
    Ok(out)
}

// ---- embed-train ----

pub fn cmd_embed_train(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let res = resources(cfg)?;
    let speeches = speeches(cfg, &mut out)?;
    let forums = forums(cfg, &mut out)?;
    let mut docs: Vec<TokenList> = speeches.iter().map(|s| preprocess(&s.text, &res.stopwords)).collect();
    docs.extend(post_docs(&flatten(&forums), &res.stopwords));
    let (model, report) = train_embeddings(&docs, &cfg.embedding_config(), worker_count(cfg.deterministic))?;
    let path = cfg.out_path("embeddings.blem");
    save_model(&model, &path)?;
    out.files.push(path);
    let mut csv = String::from("epoch,loss\n");
    for (i, l) in report.epoch_losses.iter().enumerate() {
        let _ = writeln!(csv, "{},{l}", i + 1);
    }
    out.write(cfg, "embedding_loss.csv", &csv)?;
    Ok(out)
}

// ---- validate ----

/// Centroid similarity of the two party corpora and every forum.
pub fn validate(cfg: &PipelineConfig, out: &mut Outputs) -> Result<SimilarityMatrix> {
    let res = resources(cfg)?;
    let speeches = speeches(cfg, out)?;
    let forums = forums(cfg, out)?;
    let mut corpora = vec![
        ("democrat".to_string(), party_docs(&speeches, Party::Democrat, &res.stopwords)),
        ("republican".to_string(), party_docs(&speeches, Party::Republican, &res.stopwords)),
    ];
    corpora.extend(forums.iter().map(|(name, posts)| (name.clone(), post_docs(posts, &res.stopwords))));
    let docs: Vec<TokenList> = corpora.iter().flat_map(|c| c.1.iter().cloned()).collect();
    let (model, _) = embeddings(cfg, &docs)?;
    similarity_report(&model, &corpora).context("similarity report")
}

pub fn cmd_validate(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let m = validate(cfg, &mut out)?;
    out.write(cfg, "similarity.txt", &similarity_table(&m))?;
    out.write(cfg, "similarity.jsonl", &similarity_jsonl(&m))?;
    out.write(cfg, "similarity.csv", &similarity_csv(&m))?;
    Ok(out)
}

// ---- predict ----

/// Stylistic columns (optionally without the party flag) then `emb_i`.
pub fn text_feature_names(dim: usize, include_party_flag: bool) -> Vec<String> {
    let skip = usize::from(!include_party_flag);
    StyleFeatures::NAMES[skip..]
        .iter()
        .map(|s| s.to_string())
        .chain((0..dim).map(|i| format!("emb_{i}")))
        .collect()
}

/// A text to become a prediction row. `party` is set for speeches.
pub struct TextItem<'a> {
    pub text: &'a str,
    pub party: Option<Party>,
}

pub struct TextContext<'a> {
    pub cfg: &'a PipelineConfig,
    pub res: &'a Resources,
    pub scorer: &'a BiasScorer,
    pub model: &'a EmbeddingModel,
}

/// Feature rows labeled by the binarized bias score, or by party for
/// speeches when so configured. Texts without scoreable entities are dropped
/// when `scoreable_only` is set.
pub fn text_dataset(items: &[TextItem<'_>], ctx: &TextContext<'_>) -> Result<Dataset> {
    let p = &ctx.cfg.predict;
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for item in items {
        let score = ctx.scorer.score(item.text);
        if p.scoreable_only && !score.is_scoreable() {
            continue;
        }
        let mut style = style_features(item.text, &ctx.res.lexicon);
        style.party_flag = u8::from(item.party == Some(Party::Republican));
        let mut row = style.to_vec();
        if !p.include_party_flag {
            row.remove(0);
        }
        row.extend(ctx.model.doc_vector(&preprocess(item.text, &ctx.res.stopwords)));
        rows.push(row);
        y.push(match (p.speech_label, item.party) {
            (SpeechLabel::Party, Some(party)) => u8::from(party == Party::Republican),
            _ => binarize(score.gamma).value(),
        });
    }
    if rows.is_empty() {
        return Err(Error::Core {
            context: "building prediction rows".into(),
            source: biasline_core::Error::Empty("prediction dataset"),
        });
    }
    let x = Matrix::from_rows(&rows).context("building prediction rows")?;
    Dataset::new(x, y, text_feature_names(ctx.model.dim(), p.include_party_flag)).context("building prediction rows")
}

/// Fits each spec on `train` and scores it on `test`, spreading forests over
/// the configured workers.
pub fn run_transfer(cfg: &PipelineConfig, train: &Dataset, test: &Dataset, specs: &[ModelSpec]) -> Result<Vec<TransferRow>> {
    let workers = worker_count(cfg.deterministic);
    transfer_protocol_with(train, test, specs, |s, d| fit_model_core(s, d, workers)).context("transfer protocol")
}

pub struct PredictRun {
    pub train: String,
    pub test: String,
    pub n_train: usize,
    pub n_test: usize,
    pub rows: Vec<TransferRow>,
}

pub fn predict(cfg: &PipelineConfig, out: &mut Outputs) -> Result<Vec<PredictRun>> {
    let res = resources(cfg)?;
    let speeches = speeches(cfg, out)?;
    let forums = forums(cfg, out)?;
    let all_posts = flatten(&forums);
    let scorer = scorer(cfg, &res, &speeches, &all_posts)?;
    let mut docs: Vec<TokenList> = speeches.iter().map(|s| preprocess(&s.text, &res.stopwords)).collect();
    docs.extend(post_docs(&all_posts, &res.stopwords));
    let (model, _) = embeddings(cfg, &docs)?;
    let ctx = TextContext {
        cfg,
        res: &res,
        scorer: &scorer,
        model: &model,
    };

    let forum = |name: &str| {
        forums
            .iter()
            .find(|f| f.0 == name)
            .map(|f| f.1.as_slice())
            .ok_or_else(|| Error::Config(format!("forum {name:?} is not configured under paths.posts")))
    };
    let p = &cfg.predict;
    let (train_name, train) = match p.protocol {
        Protocol::TranscriptsToForum => {
            let items: Vec<TextItem<'_>> = speeches
                .iter()
                .map(|s| TextItem {
                    text: &s.text,
                    party: Some(s.party),
                })
                .collect();
            ("speeches".to_string(), text_dataset(&items, &ctx)?)
        }
        Protocol::ForumToForum => {
            let source = p
                .source
                .clone()
                .ok_or_else(|| Error::Config("predict.source is required for forum_to_forum".into()))?;
            let data = text_dataset(&forum_items(forum(&source)?), &ctx)?;
            (source, data)
        }
    };
    let targets: Vec<String> = if !p.targets.is_empty() {
        p.targets.clone()
    } else {
        let others: Vec<String> = forums.iter().map(|f| f.0.clone()).filter(|n| *n != train_name).collect();
        if others.is_empty() {
            vec![train_name.clone()]
        } else {
            others
        }
    };
    let specs = cfg.predict_models();
    let mut runs = Vec::new();
    for target in targets {
        let test = text_dataset(&forum_items(forum(&target)?), &ctx)?;
        let rows = run_transfer(cfg, &train, &test, &specs)?;
        runs.push(PredictRun {
            train: train_name.clone(),
            test: target,
            n_train: train.len(),
            n_test: test.len(),
            rows,
        });
    }
    Ok(runs)
}

pub fn cmd_predict(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let runs = predict(cfg, &mut out)?;
    let mut text = String::new();
    let mut records = String::new();
    for r in &runs {
        let title = format!("train: {} ({} rows)  test: {} ({} rows)", r.train, r.n_train, r.test, r.n_test);
        text.push_str(&metrics_table(&title, &r.rows));
        text.push('\n');
        records.push_str(&metrics_jsonl(&[("train", &r.train), ("test", &r.test)], &r.rows));
    }
    out.write(cfg, "predict.txt", &text)?;
    out.write(cfg, "predict.jsonl", &records)?;
    Ok(out)
}

fn forum_items(posts: &[Post]) -> Vec<TextItem<'_>> {
    posts.iter().map(|p| TextItem { text: &p.text, party: None }).collect()
}

// ---- cascades and forecast ----

/// Speeches and posts the cascade stages run on: the synthetic generator's
/// output, or the configured speeches and forecast forum.
pub fn cascade_corpus(cfg: &PipelineConfig, out: &mut Outputs) -> Result<(Vec<Speech>, Vec<Post>)> {
    if cfg.forecast.synthetic {
        let s = generate(&cfg.synth_config()).map_err(|e| Error::Config(e.to_string()))?;
        return Ok((s.speeches, s.posts));
    }
    let speeches = speeches(cfg, out)?;
    let forums = forums(cfg, out)?;
    let posts = match &cfg.forecast.forum {
        Some(name) => forums
            .into_iter()
            .find(|f| &f.0 == name)
            .map(|f| f.1)
            .ok_or_else(|| Error::Config(format!("forecast.forum {name:?} is not configured under paths.posts")))?,
        None => forums.into_iter().flat_map(|f| f.1).collect(),
    };
    Ok((speeches, posts))
}

/// Builds cascades and fills sentiment, stance and bias annotations on those
/// tall enough to matter.
pub fn annotated_cascades(
    cfg: &PipelineConfig,
    res: &Resources,
    scorer: &BiasScorer,
    model: &EmbeddingModel,
    posts: &[Post],
    min_levels: usize,
    out: &mut Outputs,
) -> Result<Vec<Cascade>> {
    let built = build_cascades(posts).context("building cascades")?;
    if !built.rejected_edges.is_empty() {
        out.warnings.push(format!("{} reply edges rejected for non-increasing timestamps", built.rejected_edges.len()));
    }
    if built.missing_parents > 0 {
        out.warnings.push(format!("{} posts reply to a missing parent", built.missing_parents));
    }
    let annotator = Annotator {
        stopwords: &res.stopwords,
        lexicon: &res.lexicon,
        model,
    };
    let cascades = built.cascades;
    Ok(map_indexed(cascades.len(), worker_count(cfg.deterministic), |i| {
        let mut c = cascades[i].clone();
        if c.levels() >= min_levels {
            annotator.annotate(&mut c);
            score_bias(&mut c, scorer);
        }
        c
    }))
}

pub struct ForecastRun {
    pub cascades: usize,
    pub data: ForecastDataset,
    pub n_train: usize,
    pub n_test: usize,
    pub tables: Vec<(FeatureSet, Vec<TransferRow>)>,
}

/// Seeded shuffle split into `(train, test)` row indices.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    rng::shuffle(&mut idx, &mut rng::stream(seed, 0x5EED));
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n.saturating_sub(1).max(1));
    let test = idx.split_off(n - n_test);
    (idx, test)
}

pub fn forecast(cfg: &PipelineConfig, out: &mut Outputs) -> Result<ForecastRun> {
    let fc = cfg.forecast.forecast_config();
    let res = resources(cfg)?;
    let (speeches, posts) = cascade_corpus(cfg, out)?;
    let scorer = scorer(cfg, &res, &speeches, &posts)?;
    let (model, _) = embeddings(cfg, &post_docs(&posts, &res.stopwords))?;
    let cascades = annotated_cascades(cfg, &res, &scorer, &model, &posts, fc.min_levels, out)?;
    let ctx = FeatureContext {
        stopwords: &res.stopwords,
        model: &model,
    };
    let data = assemble_forecast_dataset(&cascades, &fc, &ctx).context("assembling forecast dataset")?;
    let (train_idx, test_idx) = split_indices(data.dataset.len(), cfg.forecast.test_fraction, cfg.seed);
    let train_all = data.dataset.select_rows(&train_idx);
    let test_all = data.dataset.select_rows(&test_idx);
    let specs = cfg.forecast_models();
    let mut tables = Vec::new();
    for set in FeatureSet::ALL {
        let cols = set.columns(model.dim());
        let train = train_all.select_features(&cols).context("selecting features")?;
        let test = test_all.select_features(&cols).context("selecting features")?;
        tables.push((set, run_transfer(cfg, &train, &test, &specs)?));
    }
    Ok(ForecastRun {
        cascades: cascades.len(),
        n_train: train_idx.len(),
        n_test: test_idx.len(),
        data,
        tables,
    })
}

fn exclusion_counts(excluded: &[(String, Exclusion)]) -> (usize, usize) {
    let short = excluded.iter().filter(|e| matches!(e.1, Exclusion::TooFewLevels { .. })).count();
    (short, excluded.len() - short)
}

pub fn cmd_forecast(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let run = forecast(cfg, &mut out)?;
    let (short, unlabeled) = exclusion_counts(&run.data.excluded);
    let (neg, pos) = run.data.dataset.class_counts();
    let mut text = format!(
        "cascades: {}  eligible: {}  too shallow: {short}  no label level: {unlabeled}\n\
         shift rate: {:.6}  train: {}  test: {}\n\n",
        run.cascades,
        run.data.dataset.len(),
        pos as f64 / (pos + neg) as f64,
        run.n_train,
        run.n_test,
    );
    let mut records = String::new();
    let mut csv = String::from("feature_set,model,accuracy\n");
    for (set, rows) in &run.tables {
        text.push_str(&metrics_table(&format!("features: {}", set.name()), rows));
        text.push('\n');
        records.push_str(&metrics_jsonl(&[("feature_set", set.name())], rows));
        for r in rows {
            let _ = writeln!(csv, "{},{},{}", set.name(), r.model, r.metrics.accuracy);
        }
    }
    out.write(cfg, "forecast.txt", &text)?;
    out.write(cfg, "forecast.jsonl", &records)?;
    out.write(cfg, "forecast_accuracy.csv", &csv)?;
    Ok(out)
}

#[derive(Serialize)]
struct CascadeRecord<'a> {
    root_id: &'a str,
    orphan: bool,
    size: usize,
    levels: usize,
    level_sizes: Vec<usize>,
    /// Prefix bias state after each level arrives.
    theta: Vec<f64>,
}

/// Writes the structure and per-level bias state of every cascade.
pub fn cmd_cascades(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let res = resources(cfg)?;
    let (speeches, posts) = cascade_corpus(cfg, &mut out)?;
    let scorer = scorer(cfg, &res, &speeches, &posts)?;
    let built = build_cascades(&posts).context("building cascades")?;
    let records: Vec<CascadeRecord<'_>> = built
        .cascades
        .iter()
        .map(|c| {
            let mut c2 = c.clone();
            score_bias(&mut c2, &scorer);
            CascadeRecord {
                root_id: c.root_id(),
                orphan: c.orphan,
                size: c.len(),
                levels: c.levels(),
                level_sizes: c.level_sizes(),
                theta: (1..=c.levels()).map(|l| theta(&c2, l).theta).collect(),
            }
        })
        .collect();
    out.write(cfg, "cascades.jsonl", &jsonl(&records))?;
    Ok(out)
}

/// Writes the synthetic corpus as loadable files plus the planted labels.
pub fn cmd_synth(cfg: &PipelineConfig) -> Result<Outputs> {
    let mut out = Outputs::default();
    let SyntheticCorpus {
        speeches,
        posts,
        planted,
    } = generate(&cfg.synth_config()).map_err(|e| Error::Config(e.to_string()))?;
    out.write(cfg, "speeches.jsonl", &io::speeches_to_jsonl(&speeches))?;
    out.write(cfg, "posts.jsonl", &io::posts_to_jsonl(&posts))?;
    let mut tsv = String::from("root_id\troot_influence\trule\tshift\n");
    for p in &planted {
        let _ = writeln!(tsv, "{}\t{}\t{}\t{}", p.root_id, p.root_influence, u8::from(p.rule), u8::from(p.shift));
    }
    out.write(cfg, "planted.tsv", &tsv)?;
    Ok(out)
}

/// Accuracy of the planted rule itself on the forecast rows, as a ceiling
/// reference for the synthetic task.
pub fn planted_rule_accuracy(cfg: &PipelineConfig, run: &ForecastRun) -> Result<f64> {
    let synth = generate(&cfg.synth_config()).map_err(|e| Error::Config(e.to_string()))?;
    let rule: std::collections::HashMap<&str, bool> = synth.planted.iter().map(|p| (p.root_id.as_str(), p.rule)).collect();
    let scores: Vec<f64> = run
        .data
        .roots
        .iter()
        .map(|r| if rule.get(r.as_str()).copied().unwrap_or(false) { 1.0 } else { 0.0 })
        .collect();
    Ok(evaluate(&run.data.dataset.y, &scores).context("scoring planted rule")?.accuracy)
}
