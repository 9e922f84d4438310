//! L2-regularized logistic regression fitted by full-batch gradient descent
//! on standardized features.

use alloc::vec;
use alloc::vec::Vec;

use super::dataset::{Matrix, Standardizer};
use crate::error::{Error, Result};
use crate::math::{dot, sigmoid};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            learning_rate: 0.5,
            iterations: 1000,
            l2: 1e-4,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || self.iterations == 0 || !(self.l2 >= 0.0) {
            return Err(Error::InvalidConfig("logistic regression needs learning_rate > 0, iterations >= 1, l2 >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression {
    scaler: Standardizer,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticRegression {
    pub fn fit(x: &Matrix, y: &[u8], params: &LogisticParams) -> Result<Self> {
        params.validate()?;
        let scaler = Standardizer::fit(x);
        let xs = scaler.transform(x);
        let n = xs.rows() as f64;
        let mut w = vec![0.0; xs.cols()];
        let mut b = 0.0;
        let mut grad = vec![0.0; xs.cols()];
        for _ in 0..params.iterations {
            grad.iter_mut().zip(&w).for_each(|(g, wi)| *g = params.l2 * wi);
            let mut grad_b = 0.0;
            for (row, &label) in xs.iter_rows().zip(y) {
                let err = (sigmoid(dot(&w, row) + b) - f64::from(label)) / n;
                for (g, v) in grad.iter_mut().zip(row) {
                    *g += err * v;
                }
                grad_b += err;
            }
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= params.learning_rate * g;
            }
            b -= params.learning_rate * grad_b;
        }
        Ok(LogisticRegression { scaler, weights: w, bias: b })
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let xs = self.scaler.transform(x);
        xs.iter_rows().map(|r| sigmoid(dot(&self.weights, r) + self.bias)).collect()
    }
}
