//! One-hidden-layer perceptron: tanh hidden units, sigmoid output, mean
//! cross-entropy plus optional L2 on the weights, full-batch gradient descent
//! on standardized features.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::dataset::{Matrix, Standardizer};
use crate::error::{Error, Result};
use crate::math::{dot, log_sigmoid, sigmoid, tanh};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct MlpParams {
    pub hidden: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: 32,
            learning_rate: 0.5,
            epochs: 500,
            l2: 0.0,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.epochs == 0 || !(self.learning_rate > 0.0) || !(self.l2 >= 0.0) {
            return Err(Error::InvalidConfig("mlp needs hidden >= 1, epochs >= 1, learning_rate > 0, l2 >= 0".into()));
        }
        Ok(())
    }
}

/// Network parameters; also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    /// `hidden x inputs`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
    pub inputs: usize,
}

impl Network {
    pub fn random(inputs: usize, hidden: usize, seed: u64) -> Self {
        let mut r = rng::seeded(seed);
        let bound = libm::sqrt(6.0 / (inputs + hidden) as f64);
        let bound2 = libm::sqrt(6.0 / (hidden + 1) as f64);
        Network {
            w1: (0..inputs * hidden).map(|_| r.gen_range(-bound..bound)).collect(),
            b1: vec![0.0; hidden],
            w2: (0..hidden).map(|_| r.gen_range(-bound2..bound2)).collect(),
            b2: 0.0,
            inputs,
        }
    }

    fn zeros_like(&self) -> Self {
        Network {
            w1: vec![0.0; self.w1.len()],
            b1: vec![0.0; self.b1.len()],
            w2: vec![0.0; self.w2.len()],
            b2: 0.0,
            inputs: self.inputs,
        }
    }

    pub fn hidden(&self) -> usize {
        self.b1.len()
    }

    fn hidden_activations(&self, row: &[f64], out: &mut [f64]) {
        for (j, a) in out.iter_mut().enumerate() {
            let w = &self.w1[j * self.inputs..(j + 1) * self.inputs];
            *a = tanh(dot(w, row) + self.b1[j]);
        }
    }

    pub fn logit(&self, row: &[f64]) -> f64 {
        let mut a = vec![0.0; self.hidden()];
        self.hidden_activations(row, &mut a);
        dot(&self.w2, &a) + self.b2
    }

    /// Mean cross-entropy over the rows plus `l2 / 2 * |weights|^2`, and its
    /// gradient with respect to every parameter.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[u8], l2: f64) -> (f64, Network) {
        let n = x.rows() as f64;
        let h = self.hidden();
        let mut grad = self.zeros_like();
        let mut a = vec![0.0; h];
        let mut loss = 0.0;
        for (row, &label) in x.iter_rows().zip(y) {
            self.hidden_activations(row, &mut a);
            let z = dot(&self.w2, &a) + self.b2;
            loss -= if label == 1 { log_sigmoid(z) } else { log_sigmoid(-z) };
            let delta = (sigmoid(z) - f64::from(label)) / n;
            grad.b2 += delta;
            for j in 0..h {
                grad.w2[j] += delta * a[j];
                let d_hidden = delta * self.w2[j] * (1.0 - a[j] * a[j]);
                grad.b1[j] += d_hidden;
                for (g, v) in grad.w1[j * self.inputs..(j + 1) * self.inputs].iter_mut().zip(row) {
                    *g += d_hidden * v;
                }
            }
        }
        loss /= n;
        if l2 > 0.0 {
            let sq: f64 = self.w1.iter().chain(&self.w2).map(|w| w * w).sum();
            loss += 0.5 * l2 * sq;
            for (g, w) in grad.w1.iter_mut().zip(&self.w1) {
                *g += l2 * w;
            }
            for (g, w) in grad.w2.iter_mut().zip(&self.w2) {
                *g += l2 * w;
            }
        }
        (loss, grad)
    }

    fn step(&mut self, grad: &Network, lr: f64) {
        for (p, g) in self.w1.iter_mut().zip(&grad.w1) {
            *p -= lr * g;
        }
        for (p, g) in self.b1.iter_mut().zip(&grad.b1) {
            *p -= lr * g;
        }
        for (p, g) in self.w2.iter_mut().zip(&grad.w2) {
            *p -= lr * g;
        }
        self.b2 -= lr * grad.b2;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    scaler: Standardizer,
    pub network: Network,
    pub loss_history: Vec<f64>,
}

impl Mlp {
    pub fn fit(x: &Matrix, y: &[u8], params: &MlpParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let scaler = Standardizer::fit(x);
        let xs = scaler.transform(x);
        let mut network = Network::random(xs.cols(), params.hidden, seed);
        let mut loss_history = Vec::with_capacity(params.epochs);
        for _ in 0..params.epochs {
            let (loss, grad) = network.loss_and_gradient(&xs, y, params.l2);
            loss_history.push(loss);
            network.step(&grad, params.learning_rate);
        }
        Ok(Mlp {
            scaler,
            network,
            loss_history,
        })
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let xs = self.scaler.transform(x);
        xs.iter_rows().map(|r| sigmoid(self.network.logit(r))).collect()
    }
}
