//! Post-level political bias score.
//!
//! Each scoreable entity contributes `(tf_r - tf_d) / (tf_r + tf_d)`. The
//! score is the mean contribution, which keeps it in `[-1, 1]`;
//! [`Normalization::Sum`] reports the raw sum instead. Entities whose weights
//! are both zero (or which are missing from the weight table) are skipped and
//! do not count towards `n`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::textproc::{EntityExtractor, EntitySet};
use crate::tfidf::PartyTfidf;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Normalization {
    #[default]
    Mean,
    Sum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasScore {
    pub gamma: f64,
    pub n_entities: usize,
    pub contributions: Vec<(String, f64)>,
}

impl BiasScore {
    pub fn neutral() -> Self {
        BiasScore {
            gamma: 0.0,
            n_entities: 0,
            contributions: Vec::new(),
        }
    }

    /// False when no entity had a defined ratio.
    pub fn is_scoreable(&self) -> bool {
        self.n_entities > 0
    }

    pub fn label(&self) -> BinaryBiasLabel {
        binarize(self.gamma)
    }
}

pub fn entity_ratio(tf_d: f64, tf_r: f64) -> Option<f64> {
    let den = tf_r + tf_d;
    (den > 0.0).then(|| ((tf_r - tf_d) / den).clamp(-1.0, 1.0))
}

pub fn bias_score(entities: &EntitySet, weights: &PartyTfidf, normalization: Normalization) -> BiasScore {
    let contributions: Vec<(String, f64)> = entities
        .iter()
        .filter_map(|e| {
            let (d, r) = weights.weights(e)?;
            entity_ratio(d, r).map(|ratio| (e.clone(), ratio))
        })
        .collect();
    let n = contributions.len();
    if n == 0 {
        return BiasScore::neutral();
    }
    let sum: f64 = contributions.iter().map(|c| c.1).sum();
    let gamma = match normalization {
        Normalization::Mean => (sum / n as f64).clamp(-1.0, 1.0),
        Normalization::Sum => sum,
    };
    BiasScore {
        gamma,
        n_entities: n,
        contributions,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryBiasLabel(pub u8);

impl BinaryBiasLabel {
    pub fn value(self) -> u8 {
        self.0
    }
}

/// 0 for `gamma <= 0` (including exactly zero), 1 otherwise.
pub fn binarize(gamma: f64) -> BinaryBiasLabel {
    BinaryBiasLabel(u8::from(gamma > 0.0))
}

/// Extracts entities and scores a text in one step.
#[derive(Debug, Clone)]
pub struct BiasScorer {
    pub extractor: EntityExtractor,
    pub weights: PartyTfidf,
    pub normalization: Normalization,
}

impl BiasScorer {
    pub fn score(&self, text: &str) -> BiasScore {
        bias_score(&self.extractor.extract(text), &self.weights, self.normalization)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusSummary {
    pub count: usize,
    pub sum: f64,
    pub mean: f64,
    pub median: f64,
}

pub fn corpus_summary(gammas: &[f64]) -> Result<CorpusSummary> {
    if gammas.is_empty() {
        return Err(Error::Empty("bias score list"));
    }
    let sum: f64 = gammas.iter().sum();
    let mut sorted = gammas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    Ok(CorpusSummary {
        count: gammas.len(),
        sum,
        mean: sum / gammas.len() as f64,
        median,
    })
}

pub fn summarize_scores(scores: &[BiasScore]) -> Result<CorpusSummary> {
    let gammas: Vec<f64> = scores.iter().map(|s| s.gamma).collect();
    corpus_summary(&gammas)
}
