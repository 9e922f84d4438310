//! Threshold metrics at 0.5 (positive class = 1) and AUROC.

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const THRESHOLD: f64 = 0.5;

pub fn hard_labels(scores: &[f64]) -> Vec<u8> {
    scores.iter().map(|&s| u8::from(s > THRESHOLD)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub false_neg: usize,
}

impl Confusion {
    pub fn from_labels(y_true: &[u8], y_pred: &[u8]) -> Self {
        let mut c = Confusion::default();
        for (&t, &p) in y_true.iter().zip(y_pred) {
            match (t, p) {
                (1, 1) => c.tp += 1,
                (0, 1) => c.fp += 1,
                (1, _) => c.false_neg += 1,
                _ => c.tn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.false_neg
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    /// `None` when `y_true` holds a single class.
    pub auroc: Option<f64>,
    /// Set when nothing was predicted positive (precision reported as 0).
    pub no_positive_predictions: bool,
    pub confusion: Confusion,
}

pub fn evaluate(y_true: &[u8], scores: &[f64]) -> Result<Metrics> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::Empty("evaluation labels"));
    }
    let c = Confusion::from_labels(y_true, &hard_labels(scores));
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.false_neg);
    let f_score = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Metrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision,
        recall,
        f_score,
        auroc: auroc(y_true, scores).ok(),
        no_positive_predictions: c.tp + c.fp == 0,
        confusion: c,
    })
}

/// Probability that a random positive outscores a random negative, ties
/// counted half. Computed by ranking, which equals exhaustive pair counting.
pub fn auroc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let n_pos = y_true.iter().filter(|&&v| v == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    // pairs (neg, pos) with neg strictly below pos, plus half the tied pairs
    let mut wins = 0.0;
    let mut neg_below = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let group = &order[i..j];
        let pos_here = group.iter().filter(|&&k| y_true[k] == 1).count();
        let neg_here = group.len() - pos_here;
        wins += pos_here as f64 * (neg_below as f64 + 0.5 * neg_here as f64);
        neg_below += neg_here;
        i = j;
    }
    Ok(wins / (n_pos as f64 * n_neg as f64))
}

/// ROC curve points `(fpr, tpr)` sweeping the threshold from high to low;
/// tied scores move diagonally.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n_pos = y_true.iter().filter(|&&v| v == 1).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = alloc::vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
    }
    Ok(points)
}

/// Area under [`roc_curve`] by the trapezoid rule.
pub fn auroc_trapezoid(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    let pts = roc_curve(y_true, scores)?;
    Ok(pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum())
}
