//! Reply cascades: construction from parent links, sentiment/stance
//! annotation, prefix bias state, shift labels and prefix features.
//!
//! Levels are zero-indexed with the root at level 0. A prefix of `d` levels
//! holds the nodes at levels `0..d`; the shift label for that prefix compares
//! it with the prefix of `d + 1` levels, so it needs at least one node at
//! level `d`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::bias::BiasScorer;
use crate::corpus::Post;
use crate::embed::{cosine, EmbeddingModel};
use crate::error::{Error, Result};
use crate::math::{mean, ratio, variance};
use crate::ml::{Dataset, Matrix};
use crate::textproc::{preprocess, sentiment, SentimentLexicon, Stopwords};

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeNode {
    pub post: Post,
    pub parent: Option<usize>,
    /// Indices of direct replies, ordered by `(timestamp, id)`.
    pub children: Vec<usize>,
    pub level: usize,
    /// Sentiment `z`.
    pub sentiment: f64,
    /// Stance `w` of the edge to the parent; 0 for the root.
    pub stance: f64,
    /// Bias score, `None` when the post has no scoreable entity.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    /// Breadth-first order; index 0 is the root.
    nodes: Vec<CascadeNode>,
    index: BTreeMap<String, usize>,
    /// The root had a parent link that was missing or rejected.
    pub orphan: bool,
}

impl Cascade {
    pub fn root(&self) -> &CascadeNode {
        &self.nodes[0]
    }

    pub fn root_id(&self) -> &str {
        &self.nodes[0].post.id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[CascadeNode] {
        &self.nodes
    }

    pub fn node_mut(&mut self, i: usize) -> &mut CascadeNode {
        &mut self.nodes[i]
    }

    pub fn get(&self, id: &str) -> Option<&CascadeNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    /// Number of distinct levels (deepest level + 1).
    pub fn levels(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().map_or(0, |l| l + 1)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.levels()];
        for n in &self.nodes {
            sizes[n.level] += 1;
        }
        sizes
    }

    /// `(child_id, parent_id, stance)` per edge.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (n.post.id.as_str(), self.nodes[p].post.id.as_str(), n.stance)))
    }

    /// Node indices with level below `levels`.
    pub fn prefix(&self, levels: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].level < levels).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRejection {
    /// Child timestamp not strictly after the parent's.
    NonIncreasingTimestamp,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedEdge {
    pub child: String,
    pub parent: String,
    pub reason: EdgeRejection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeBuild {
    pub cascades: Vec<Cascade>,
    pub rejected_edges: Vec<RejectedEdge>,
    /// Posts whose parent id does not occur in the corpus.
    pub missing_parents: usize,
}

fn find_cycle(posts: &[Post], by_id: &BTreeMap<&str, usize>) -> Option<Vec<String>> {
    // 0 = unvisited, 1 = on the current walk, 2 = finished
    let mut state = vec![0u8; posts.len()];
    for start in 0..posts.len() {
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            match state[i] {
                2 => break,
                1 => {
                    let pos = walk.iter().position(|&w| w == i).unwrap_or(0);
                    return Some(walk[pos..].iter().map(|&w: &usize| posts[w].id.clone()).collect());
                }
                _ => {}
            }
            state[i] = 1;
            walk.push(i);
            cur = posts[i].parent_id.as_deref().and_then(|p| by_id.get(p).copied());
        }
        for w in walk {
            state[w] = 2;
        }
    }
    None
}

/// Groups posts into reply trees.
///
/// A post without a parent roots a cascade. A post whose parent is missing,
/// or whose timestamp does not strictly follow its parent's, roots its own
/// cascade flagged as an orphan. Parent-link cycles are an error. Cascades
/// are ordered by root `(timestamp, id)`.
pub fn build_cascades(posts: &[Post]) -> Result<CascadeBuild> {
    let mut by_id: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, p) in posts.iter().enumerate() {
        if by_id.insert(p.id.as_str(), i).is_some() {
            return Err(Error::InvalidRecord(format!("duplicate post id {}", p.id)));
        }
    }
    if let Some(cycle) = find_cycle(posts, &by_id) {
        return Err(Error::Cycle(cycle));
    }
    let mut rejected_edges = Vec::new();
    let mut missing_parents = 0;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); posts.len()];
    let mut roots = Vec::new();
    for (i, p) in posts.iter().enumerate() {
        let Some(pid) = p.parent_id.as_deref() else {
            roots.push((i, false));
            continue;
        };
        match by_id.get(pid) {
            None => {
                missing_parents += 1;
                roots.push((i, true));
            }
            Some(&j) if posts[j].timestamp >= p.timestamp => {
                rejected_edges.push(RejectedEdge {
                    child: p.id.clone(),
                    parent: pid.to_string(),
                    reason: EdgeRejection::NonIncreasingTimestamp,
                });
                roots.push((i, true));
            }
            Some(&j) => children[j].push(i),
        }
    }
    let key = |i: &usize| (posts[*i].timestamp, posts[*i].id.as_str());
    for c in &mut children {
        c.sort_by(|a, b| key(a).cmp(&key(b)));
    }
    roots.sort_by(|a, b| key(&a.0).cmp(&key(&b.0)));

    let cascades = roots
        .into_iter()
        .map(|(root, orphan)| {
            let mut nodes: Vec<CascadeNode> = Vec::new();
            let mut queue: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
            let mut head = 0;
            while head < queue.len() {
                let (post, parent, level) = queue[head];
                let slot = nodes.len();
                if let Some(p) = parent {
                    nodes[p].children.push(slot);
                }
                nodes.push(CascadeNode {
                    post: posts[post].clone(),
                    parent,
                    children: Vec::new(),
                    level,
                    sentiment: 0.0,
                    stance: 0.0,
                    gamma: None,
                });
                for &c in &children[post] {
                    queue.push((c, Some(slot), level + 1));
                }
                head += 1;
            }
            let index = nodes.iter().enumerate().map(|(i, n)| (n.post.id.clone(), i)).collect();
            Cascade { nodes, index, orphan }
        })
        .collect();
    Ok(CascadeBuild {
        cascades,
        rejected_edges,
        missing_parents,
    })
}

pub fn filter_min_levels(cascades: Vec<Cascade>, min_levels: usize) -> Vec<Cascade> {
    cascades.into_iter().filter(|c| c.levels() >= min_levels).collect()
}

/// Resources for sentiment and stance annotation.
#[derive(Debug, Clone, Copy)]
pub struct Annotator<'a> {
    pub stopwords: &'a Stopwords,
    pub lexicon: &'a SentimentLexicon,
    pub model: &'a EmbeddingModel,
}

/// Stance of a reply: document cosine, negated when the two sentiments have
/// strictly opposite signs.
pub fn stance(child_vec: &[f64], parent_vec: &[f64], child_z: f64, parent_z: f64) -> f64 {
    let c = cosine(child_vec, parent_vec).unwrap_or(0.0);
    let opposite = (child_z > 0.0 && parent_z < 0.0) || (child_z < 0.0 && parent_z > 0.0);
    (if opposite { -c } else { c }).clamp(-1.0, 1.0)
}

impl Annotator<'_> {
    pub fn doc_vector(&self, text: &str) -> Vec<f64> {
        self.model.doc_vector(&preprocess(text, self.stopwords))
    }

    /// Fills `sentiment` on every node and `stance` on every edge.
    pub fn annotate(&self, cascade: &mut Cascade) {
        let vectors: Vec<Vec<f64>> = cascade.nodes.iter().map(|n| self.doc_vector(&n.post.text)).collect();
        for n in &mut cascade.nodes {
            n.sentiment = sentiment(&n.post.text, self.lexicon);
        }
        for i in 0..cascade.nodes.len() {
            let Some(p) = cascade.nodes[i].parent else {
                cascade.nodes[i].stance = 0.0;
                continue;
            };
            let (zc, zp) = (cascade.nodes[i].sentiment, cascade.nodes[p].sentiment);
            cascade.nodes[i].stance = stance(&vectors[i], &vectors[p], zc, zp);
        }
    }
}

/// Fills `gamma` on every node from its text.
pub fn score_bias(cascade: &mut Cascade, scorer: &BiasScorer) {
    for n in &mut cascade.nodes {
        let s = scorer.score(&n.post.text);
        n.gamma = s.is_scoreable().then_some(s.gamma);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeBiasState {
    pub theta: f64,
    /// Prefix posts with scoreable entities.
    pub n_scored: usize,
}

impl CascadeBiasState {
    pub fn has_scored(&self) -> bool {
        self.n_scored > 0
    }
}

/// Mean `gamma` over scored nodes at levels below `upto_level`; 0 when none.
pub fn theta(cascade: &Cascade, upto_level: usize) -> CascadeBiasState {
    let scored: Vec<f64> = cascade
        .nodes
        .iter()
        .filter(|n| n.level < upto_level)
        .filter_map(|n| n.gamma)
        .collect();
    CascadeBiasState {
        theta: mean(&scored),
        n_scored: scored.len(),
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Shift predicate between two consecutive prefix states. With `epsilon`
/// equal to 0 or infinity this is exactly a sign change (0 is its own sign);
/// a positive finite `epsilon` also fires when `|after - before| > epsilon`.
pub fn is_shift(before: f64, after: f64, epsilon: f64) -> bool {
    sign(before) != sign(after) || (epsilon > 0.0 && libm::fabs(after - before) > epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// Fewer levels than the minimum.
    TooFewLevels { levels: usize },
    /// No node at the label level.
    NoLabelLevel,
}

/// Label for the prefix of `d` levels: whether adding level `d` shifts theta.
pub fn shift_label(cascade: &Cascade, d: usize, epsilon: f64) -> core::result::Result<u8, Exclusion> {
    if cascade.levels() <= d {
        return Err(Exclusion::NoLabelLevel);
    }
    let before = theta(cascade, d).theta;
    let after = theta(cascade, d + 1).theta;
    Ok(u8::from(is_shift(before, after, epsilon)))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ForecastConfig {
    pub min_levels: usize,
    pub train_levels: usize,
    pub shift_epsilon: f64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        ForecastConfig {
            min_levels: 5,
            train_levels: 4,
            shift_epsilon: 0.0,
        }
    }
}

impl ForecastConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train_levels == 0 || self.train_levels >= self.min_levels {
            return Err(Error::InvalidConfig(format!(
                "forecast needs 1 <= train_levels < min_levels, got {} and {}",
                self.train_levels, self.min_levels
            )));
        }
        if !(self.shift_epsilon >= 0.0) || !self.shift_epsilon.is_finite() {
            return Err(Error::InvalidConfig("shift_epsilon must be finite and non-negative".into()));
        }
        Ok(())
    }
}

pub const USER_FEATURES: [&str; 8] = [
    "user.root_influence",
    "user.border_influence",
    "user.distinct_authors",
    "user.author_post_ratio",
    "user.mean_followers",
    "user.max_followers",
    "user.repeat_reply_fraction",
    "user.root_author_reply_share",
];

pub const POLARITY_FEATURES: [&str; 6] = [
    "polarity.positive_influence",
    "polarity.negative_influence",
    "polarity.mean_sentiment",
    "polarity.sentiment_variance",
    "polarity.positive_fraction",
    "polarity.negative_fraction",
];

pub const CASCADE_FEATURES: [&str; 11] = [
    "cascade.nodes",
    "cascade.levels",
    "cascade.max_branching",
    "cascade.mean_branching",
    "cascade.leaf_fraction",
    "cascade.sentiment_reshares",
    "cascade.stance_reshares",
    "cascade.mean_stance",
    "cascade.stance_variance",
    "cascade.negative_stance_fraction",
    "cascade.max_subtree_depth",
];

pub const TEMPORAL_FEATURES: [&str; 5] = [
    "temporal.root_activity",
    "temporal.root_response",
    "temporal.mean_gap",
    "temporal.span",
    "temporal.mean_level_gap",
];

pub const ENGINEERED_FEATURES: usize = 8 + 6 + 11 + 5;

/// Which columns a forecasting model sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureSet {
    Engineered,
    Text,
    Combined,
}

impl FeatureSet {
    pub const ALL: [FeatureSet; 3] = [FeatureSet::Engineered, FeatureSet::Text, FeatureSet::Combined];

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::Engineered => "engineered",
            FeatureSet::Text => "text",
            FeatureSet::Combined => "combined",
        }
    }

    pub fn columns(self, dim: usize) -> Vec<String> {
        let all = feature_names(dim);
        match self {
            FeatureSet::Engineered => all[..ENGINEERED_FEATURES].to_vec(),
            FeatureSet::Text => all[ENGINEERED_FEATURES..].to_vec(),
            FeatureSet::Combined => all,
        }
    }
}

/// Column names for a combined feature vector with `dim` embedding columns.
pub fn feature_names(dim: usize) -> Vec<String> {
    USER_FEATURES
        .iter()
        .chain(&POLARITY_FEATURES)
        .chain(&CASCADE_FEATURES)
        .chain(&TEMPORAL_FEATURES)
        .map(|s| s.to_string())
        .chain((0..dim).map(|i| format!("text.emb_{i}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeFeatureVector {
    pub user: [f64; 8],
    pub polarity: [f64; 6],
    pub cascade: [f64; 11],
    pub temporal: [f64; 5],
    /// Mean document embedding of the prefix posts.
    pub text: Vec<f64>,
}

impl CascadeFeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        self.user
            .iter()
            .chain(&self.polarity)
            .chain(&self.cascade)
            .chain(&self.temporal)
            .chain(&self.text)
            .copied()
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FeatureContext<'a> {
    pub stopwords: &'a Stopwords,
    pub model: &'a EmbeddingModel,
}

fn mean_gap(sorted: &[i64]) -> f64 {
    if sorted.len() < 2 {
        return 0.0;
    }
    (sorted[sorted.len() - 1] - sorted[0]) as f64 / (sorted.len() - 1) as f64
}

/// Features of the `d`-level prefix. Only nodes at levels below `d` are read.
pub fn extract_features(cascade: &Cascade, d: usize, ctx: &FeatureContext<'_>) -> CascadeFeatureVector {
    let nodes = &cascade.nodes;
    let prefix = cascade.prefix(d);
    let in_prefix = |i: usize| nodes[i].level < d;
    let kids = |i: usize| nodes[i].children.iter().copied().filter(|&c| in_prefix(c));
    let n = prefix.len() as f64;
    let root = &nodes[0];
    let replies: Vec<usize> = prefix.iter().copied().filter(|&i| i != 0).collect();
    let followers = |i: usize| nodes[i].post.author_follower_count.unwrap_or(0) as f64;
    let reshares = |i: usize| nodes[i].post.reshare_count.unwrap_or(0) as f64;

    // user
    let mut authors: BTreeMap<&str, (f64, usize)> = BTreeMap::new();
    for &i in &prefix {
        let e = authors.entry(nodes[i].post.author.as_str()).or_insert((followers(i), 0));
        if i != 0 {
            e.1 += 1;
        }
    }
    let a = authors.len() as f64;
    let total_followers: f64 = authors.values().map(|v| v.0).sum();
    let border: f64 = authors.values().map(|v| (v.0 - (a - 1.0)).max(0.0)).sum();
    let root_author_replies = replies.iter().filter(|&&i| nodes[i].post.author == root.post.author).count();
    let user = [
        ratio(kids(0).count() as f64, followers(0)),
        ratio(border, total_followers),
        a,
        ratio(a, n),
        ratio(total_followers, a),
        authors.values().map(|v| v.0).fold(0.0, f64::max),
        ratio(authors.values().filter(|v| v.1 > 1).count() as f64, a),
        ratio(root_author_replies as f64, replies.len() as f64),
    ];

    // polarity
    let z: Vec<f64> = prefix.iter().map(|&i| nodes[i].sentiment).collect();
    let pos: Vec<f64> = z.iter().copied().filter(|v| *v > 0.0).collect();
    let neg: Vec<f64> = z.iter().copied().filter(|v| *v < 0.0).collect();
    let polarity = [
        mean(&pos),
        mean(&neg),
        mean(&z),
        variance(&z),
        ratio(pos.len() as f64, n),
        ratio(neg.len() as f64, n),
    ];

    // structure
    let branching: Vec<f64> = prefix.iter().map(|&i| kids(i).count() as f64).collect();
    let internal: Vec<f64> = branching.iter().copied().filter(|b| *b > 0.0).collect();
    let mean_reshares_where = |pred: &dyn Fn(usize) -> bool, set: &[usize]| {
        let r: Vec<f64> = set.iter().copied().filter(|&i| pred(i)).map(reshares).collect();
        mean(&r)
    };
    let w: Vec<f64> = replies.iter().map(|&i| nodes[i].stance).collect();
    // prefix subtree sizes; children always follow parents in breadth-first order
    let mut subtree = vec![0usize; nodes.len()];
    for &i in prefix.iter().rev() {
        subtree[i] += 1;
        if let Some(p) = nodes[i].parent {
            subtree[p] += subtree[i];
        }
    }
    let mut max_subtree: Option<(usize, usize)> = None;
    for &i in &replies {
        if max_subtree.is_none_or(|(s, _)| subtree[i] > s) {
            max_subtree = Some((subtree[i], nodes[i].level));
        }
    }
    let structure = [
        n,
        prefix.iter().map(|&i| nodes[i].level + 1).max().unwrap_or(0) as f64,
        branching.iter().copied().fold(0.0, f64::max),
        mean(&internal),
        ratio(branching.iter().filter(|b| **b == 0.0).count() as f64, n),
        mean_reshares_where(&|i| nodes[i].sentiment > 0.0, &prefix) - mean_reshares_where(&|i| nodes[i].sentiment < 0.0, &prefix),
        mean_reshares_where(&|i| nodes[i].stance > 0.0, &replies) - mean_reshares_where(&|i| nodes[i].stance < 0.0, &replies),
        mean(&w),
        variance(&w),
        ratio(w.iter().filter(|v| **v < 0.0).count() as f64, w.len() as f64),
        max_subtree.map_or(0.0, |(_, level)| level as f64),
    ];

    // temporal
    let mut root_posts: Vec<i64> = prefix
        .iter()
        .filter(|&&i| nodes[i].post.author == root.post.author)
        .map(|&i| nodes[i].post.timestamp)
        .collect();
    root_posts.sort_unstable();
    let mut times: Vec<i64> = prefix.iter().map(|&i| nodes[i].post.timestamp).collect();
    times.sort_unstable();
    let first_reply = kids(0).map(|c| nodes[c].post.timestamp).min();
    let mut first_at_level: BTreeMap<usize, i64> = BTreeMap::new();
    for &i in &prefix {
        let e = first_at_level.entry(nodes[i].level).or_insert(i64::MAX);
        *e = (*e).min(nodes[i].post.timestamp);
    }
    let level_firsts: Vec<i64> = first_at_level.values().copied().collect();
    let temporal = [
        mean_gap(&root_posts),
        first_reply.map_or(0.0, |t| (t - root.post.timestamp) as f64),
        mean_gap(&times),
        times.last().map_or(0.0, |l| (l - times[0]) as f64),
        mean_gap(&level_firsts),
    ];

    // text
    let dim = ctx.model.dim();
    let mut text = vec![0.0; dim];
    for &i in &prefix {
        let v = ctx.model.doc_vector(&preprocess(&nodes[i].post.text, ctx.stopwords));
        for (t, x) in text.iter_mut().zip(v) {
            *t += x / n;
        }
    }

    CascadeFeatureVector {
        user,
        polarity,
        cascade: structure,
        temporal,
        text,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastDataset {
    pub dataset: Dataset,
    /// Root id per row.
    pub roots: Vec<String>,
    pub excluded: Vec<(String, Exclusion)>,
}

/// One row per eligible cascade: features of the `train_levels` prefix and
/// the shift label. Cascades must already carry sentiment, stance and bias
/// annotations.
pub fn assemble_forecast_dataset(cascades: &[Cascade], config: &ForecastConfig, ctx: &FeatureContext<'_>) -> Result<ForecastDataset> {
    config.validate()?;
    let d = config.train_levels;
    let mut rows = Vec::new();
    let mut y = Vec::new();
    let mut roots = Vec::new();
    let mut excluded = Vec::new();
    for c in cascades {
        if c.levels() < config.min_levels {
            excluded.push((c.root_id().to_string(), Exclusion::TooFewLevels { levels: c.levels() }));
            continue;
        }
        match shift_label(c, d, config.shift_epsilon) {
            Ok(label) => {
                rows.push(extract_features(c, d, ctx).to_vec());
                y.push(label);
                roots.push(c.root_id().to_string());
            }
            Err(e) => excluded.push((c.root_id().to_string(), e)),
        }
    }
    if rows.is_empty() {
        return Err(Error::NoEligibleCascades { excluded: excluded.len() });
    }
    let x = Matrix::from_rows(&rows)?;
    let dataset = Dataset::new(x, y, feature_names(ctx.model.dim()))?;
    Ok(ForecastDataset {
        dataset,
        roots,
        excluded,
    })
}
