//! CART classification tree with Gini impurity.
//!
//! Thresholds are midpoints between consecutive distinct feature values and a
//! sample goes left when `x <= threshold`. When gains tie, the lower feature
//! index wins and then the smaller threshold. A split with zero gain is still
//! taken while the node is impure, so parity-style targets (XOR) are reachable.

use alloc::vec::Vec;

use super::dataset::Matrix;
use crate::error::{Error, Result};
use crate::rng::{self, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => libm::floor(libm::sqrt(n_features as f64)) as usize,
            MaxFeatures::Count(k) => k,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::All,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 || self.min_samples_split < 2 || self.min_samples_leaf == 0 {
            return Err(Error::InvalidConfig(
                "tree needs max_depth >= 1, min_samples_split >= 2, min_samples_leaf >= 1".into(),
            ));
        }
        if self.max_features == MaxFeatures::Count(0) {
            return Err(Error::InvalidConfig("max_features count must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        /// Fraction of positive training samples reaching the leaf.
        probability: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

fn gini(pos: f64, total: f64) -> f64 {
    if total == 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    params: &'a TreeParams,
    n_candidates: usize,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        self.nodes.push(Node::Leaf {
            probability: pos as f64 / idx.len().max(1) as f64,
            samples: idx.len(),
        });
        self.nodes.len() - 1
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let p = self.x.cols();
        if self.n_candidates >= p {
            (0..p).collect()
        } else {
            rng::sample_indices(p, self.n_candidates, self.rng)
        }
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<BestSplit> {
        let n = idx.len() as f64;
        let total_pos = idx.iter().filter(|&&i| self.y[i] == 1).count() as f64;
        let parent = gini(total_pos, n);
        let min_leaf = self.params.min_samples_leaf;
        let mut best: Option<BestSplit> = None;
        let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(idx.len());
        for feature in self.candidate_features() {
            pairs.clear();
            pairs.extend(idx.iter().map(|&i| (self.x.get(i, feature), self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_pos = 0.0;
            for k in 0..pairs.len() - 1 {
                left_pos += f64::from(pairs[k].1);
                let (lo, hi) = (pairs[k].0, pairs[k + 1].0);
                if lo == hi {
                    continue;
                }
                let n_left = k + 1;
                let n_right = pairs.len() - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    threshold = lo;
                }
                let (nl, nr) = (n_left as f64, n_right as f64);
                let child = (nl * gini(left_pos, nl) + nr * gini(total_pos - left_pos, nr)) / n;
                let gain = parent - child;
                if best.as_ref().is_none_or(|b| gain > b.gain + 1e-12) {
                    best = Some(BestSplit { feature, threshold, gain });
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let pure = pos == 0 || pos == idx.len();
        if pure || depth >= self.params.max_depth || idx.len() < self.params.min_samples_split {
            return self.leaf(&idx);
        }
        let Some(split) = self.best_split(&idx) else {
            return self.leaf(&idx);
        };
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x.get(i, split.feature) <= split.threshold);
        let slot = self.nodes.len();
        self.nodes.push(Node::Leaf {
            probability: 0.0,
            samples: 0,
        });
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[slot] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: l,
            right: r,
        };
        slot
    }
}

impl DecisionTree {
    /// Fits on the rows listed in `sample` (duplicates allowed, as produced by
    /// bootstrapping). Feature subsampling draws from `rng`.
    pub fn fit_rows(x: &Matrix, y: &[u8], sample: Vec<usize>, params: &TreeParams, rng: &mut ChaCha8Rng) -> Result<Self> {
        params.validate()?;
        if sample.is_empty() {
            return Err(Error::Empty("tree training sample"));
        }
        let mut builder = Builder {
            x,
            y,
            params,
            n_candidates: params.max_features.resolve(x.cols()),
            rng,
            nodes: Vec::new(),
        };
        builder.grow(sample, 0);
        Ok(DecisionTree { nodes: builder.nodes })
    }

    pub fn fit(x: &Matrix, y: &[u8], params: &TreeParams, seed: u64) -> Result<Self> {
        let mut rng = rng::seeded(seed);
        Self::fit_rows(x, y, (0..x.rows()).collect(), params, &mut rng)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { probability, .. } => return probability,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.iter_rows().map(|r| self.predict_row(r)).collect()
    }
}
