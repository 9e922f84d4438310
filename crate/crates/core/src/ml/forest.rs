//! Bagged CART ensemble.
//!
//! Tree `i` draws from its own random stream (`seed`, stream `i`), so trees can
//! be fitted in any order or in parallel with identical results. With
//! `n_trees = 1` and bootstrap disabled the single tree is the same tree
//! [`DecisionTree::fit`] builds from the same seed.

use alloc::vec::Vec;

use rand::Rng;

use super::dataset::Matrix;
use super::tree::{DecisionTree, MaxFeatures, TreeParams};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            bootstrap: true,
            max_depth: 12,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
        }
    }
}

impl ForestParams {
    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
            max_features: self.max_features,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidConfig("forest needs n_trees >= 1".into()));
        }
        self.tree_params().validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Fits tree `index` of a forest; exposed so callers can distribute trees
    /// across threads.
    pub fn fit_tree(x: &Matrix, y: &[u8], params: &ForestParams, seed: u64, index: usize) -> Result<DecisionTree> {
        let mut r = rng::stream(seed, index as u64);
        let n = x.rows();
        let sample: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| r.gen_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        DecisionTree::fit_rows(x, y, sample, &params.tree_params(), &mut r)
    }

    pub fn fit(x: &Matrix, y: &[u8], params: &ForestParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let trees = (0..params.n_trees)
            .map(|i| Self::fit_tree(x, y, params, seed, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(RandomForest { trees })
    }

    pub fn from_trees(trees: Vec<DecisionTree>) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::Empty("forest trees"));
        }
        Ok(RandomForest { trees })
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean of per-tree leaf probabilities.
    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let k = self.trees.len() as f64;
        x.iter_rows()
            .map(|r| self.trees.iter().map(|t| t.predict_row(r)).sum::<f64>() / k)
            .collect()
    }

    /// Majority vote of hard tree predictions; ties go to class 0.
    pub fn predict(&self, x: &Matrix) -> Vec<u8> {
        x.iter_rows()
            .map(|r| {
                let votes = self.trees.iter().filter(|t| t.predict_row(r) > 0.5).count();
                u8::from(2 * votes > self.trees.len())
            })
            .collect()
    }
}
