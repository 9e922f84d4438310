//! Quadratic discriminant analysis: one Gaussian per class with its own
//! covariance (sample covariance plus a diagonal ridge), on standardized
//! features.

use alloc::vec;
use alloc::vec::Vec;

use super::dataset::{Matrix, Standardizer};
use crate::error::{Error, Result};
use crate::math::{ln, sigmoid, sqrt};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct QdaParams {
    pub ridge: f64,
}

impl Default for QdaParams {
    fn default() -> Self {
        QdaParams { ridge: 1e-6 }
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

#[derive(Debug, Clone, PartialEq)]
struct ClassGaussian {
    mean: Vec<f64>,
    chol: Vec<f64>,
    log_det: f64,
    log_prior: f64,
}

impl ClassGaussian {
    fn log_density(&self, row: &[f64]) -> f64 {
        let n = self.mean.len();
        // forward substitution L z = (x - mu)
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = row[i] - self.mean[i];
            for k in 0..i {
                s -= self.chol[i * n + k] * z[k];
            }
            z[i] = s / self.chol[i * n + i];
        }
        let quad: f64 = z.iter().map(|v| v * v).sum();
        -0.5 * (quad + self.log_det) + self.log_prior
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qda {
    scaler: Standardizer,
    classes: [ClassGaussian; 2],
}

impl Qda {
    pub fn fit(x: &Matrix, y: &[u8], params: &QdaParams) -> Result<Self> {
        if !(params.ridge >= 0.0) {
            return Err(Error::InvalidConfig("qda ridge must be non-negative".into()));
        }
        let scaler = Standardizer::fit(x);
        let xs = scaler.transform(x);
        let p = xs.cols();
        let n = xs.rows() as f64;
        let fit_class = |class: u8| -> Result<ClassGaussian> {
            let rows: Vec<&[f64]> = xs.iter_rows().zip(y).filter(|(_, &l)| l == class).map(|(r, _)| r).collect();
            if rows.len() < 2 {
                return Err(Error::InvalidDataset(alloc::format!(
                    "qda needs at least 2 samples of class {class}, got {}",
                    rows.len()
                )));
            }
            let m = rows.len() as f64;
            let mut mean = vec![0.0; p];
            for r in &rows {
                for (a, b) in mean.iter_mut().zip(r.iter()) {
                    *a += b / m;
                }
            }
            let mut cov = vec![0.0; p * p];
            for r in &rows {
                for i in 0..p {
                    let di = r[i] - mean[i];
                    for j in 0..=i {
                        cov[i * p + j] += di * (r[j] - mean[j]) / (m - 1.0);
                    }
                }
            }
            for i in 0..p {
                for j in 0..i {
                    cov[j * p + i] = cov[i * p + j];
                }
                cov[i * p + i] += params.ridge;
            }
            let chol = cholesky(&cov, p).ok_or(Error::SingularCovariance(class))?;
            let log_det = 2.0 * (0..p).map(|i| ln(chol[i * p + i])).sum::<f64>();
            Ok(ClassGaussian {
                mean,
                chol,
                log_det,
                log_prior: ln(m / n),
            })
        };
        let c0 = fit_class(0)?;
        let c1 = fit_class(1)?;
        Ok(Qda {
            scaler,
            classes: [c0, c1],
        })
    }

    pub fn predict_proba(&self, x: &Matrix) -> Vec<f64> {
        let xs = self.scaler.transform(x);
        xs.iter_rows()
            .map(|r| sigmoid(self.classes[1].log_density(r) - self.classes[0].log_density(r)))
            .collect()
    }
}
