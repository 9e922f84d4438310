//! SAMME boosting over decision stumps (two classes).
//!
//! Each round picks the stump with the lowest weighted error (ties: lowest
//! feature, then smallest threshold), weights it by `ln((1 - err) / err)` and
//! up-weights the samples it misclassifies. Boosting stops early when a stump
//! is perfect or no stump beats chance.

use alloc::vec;
use alloc::vec::Vec;

use super::dataset::Matrix;
use crate::error::{Error, Result};
use crate::math::{exp, ln, sigmoid};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AdaBoostParams {
    pub rounds: usize,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams { rounds: 50 }
    }
}

impl AdaBoostParams {
    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("adaboost needs rounds >= 1".into()));
        }
        Ok(())
    }
}

/// Predicts `positive_above` for `x > threshold` and the other class
/// otherwise. A threshold of `+inf` yields a constant predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub positive_above: bool,
}

impl Stump {
    /// `+1` or `-1`.
    pub fn vote(&self, row: &[f64]) -> f64 {
        let above = row[self.feature] > self.threshold;
        if above == self.positive_above {
            1.0
        } else {
            -1.0
        }
    }
}

const MIN_ERROR: f64 = 1e-10;

fn best_stump(x: &Matrix, y: &[u8], w: &[f64]) -> (Stump, f64) {
    let total_pos: f64 = w.iter().zip(y).filter(|(_, &l)| l == 1).map(|(v, _)| v).sum();
    let total: f64 = w.iter().sum();
    // constant predictors: everything positive errs on the negatives
    let (mut best, mut best_err) = if total - total_pos <= total_pos {
        (
            Stump {
                feature: 0,
                threshold: f64::INFINITY,
                positive_above: false,
            },
            total - total_pos,
        )
    } else {
        (
            Stump {
                feature: 0,
                threshold: f64::INFINITY,
                positive_above: true,
            },
            total_pos,
        )
    };
    let mut order: Vec<usize> = (0..x.rows()).collect();
    for feature in 0..x.cols() {
        order.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)));
        let mut left_pos = 0.0;
        let mut left_neg = 0.0;
        for k in 0..order.len() - 1 {
            let i = order[k];
            if y[i] == 1 {
                left_pos += w[i];
            } else {
                left_neg += w[i];
            }
            let (lo, hi) = (x.get(i, feature), x.get(order[k + 1], feature));
            if lo == hi {
                continue;
            }
            let mut threshold = lo + (hi - lo) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            // positive above: errors are left positives + right negatives
            let right_neg = total - total_pos - left_neg;
            let err_above = left_pos + right_neg;
            let err_below = total - err_above;
            for (err, positive_above) in [(err_above, true), (err_below, false)] {
                if err < best_err - 1e-12 {
                    best_err = err;
                    best = Stump {
                        feature,
                        threshold,
                        positive_above,
                    };
                }
            }
        }
    }
    (best, best_err / total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaBoost {
    pub stumps: Vec<(Stump, f64)>,
}

impl AdaBoost {
    pub fn fit(x: &Matrix, y: &[u8], params: &AdaBoostParams) -> Result<Self> {
        params.validate()?;
        let n = x.rows();
        let mut w = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        for _ in 0..params.rounds {
            let (stump, err) = best_stump(x, y, &w);
            if err >= 0.5 - 1e-12 {
                if stumps.is_empty() {
                    stumps.push((stump, 0.0));
                }
                break;
            }
            let err = err.max(MIN_ERROR);
            let alpha = ln((1.0 - err) / err);
            stumps.push((stump, alpha));
            if err <= MIN_ERROR {
                break;
            }
            let factor = exp(alpha);
            for (i, wi) in w.iter_mut().enumerate() {
                let correct = (stump.vote(x.row(i)) > 0.0) == (y[i] == 1);
                if !correct {
                    *wi *= factor;
                }
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
        }
        Ok(AdaBoost { stumps })
    }

    pub fn decision(&self, row: &[f64]) -> f64 {
        self.stumps.iter().map(|(s, a)| a * s.vote(row)).sum()
    }

    /// Decision value of the first `rounds` stumps only.
    pub fn staged_decision(&self, row: &[f64], rounds: usize) -> f64 {
        self.stumps.iter().take(rounds).map(|(s, a)| a * s.vote(row)).sum()
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        x.iter_rows().map(|r| sigmoid(self.decision(r))).collect()
    }
}
