//! Binary classifiers, evaluation metrics and the transfer protocol.

pub mod adaboost;
pub mod dataset;
pub mod forest;
pub mod logistic;
pub mod metrics;
pub mod mlp;
pub mod qda;
pub mod transfer;
pub mod tree;

use alloc::string::String;
use alloc::vec::Vec;

pub use adaboost::{AdaBoost, AdaBoostParams};
pub use dataset::{Dataset, Matrix, Standardizer};
pub use forest::{ForestParams, RandomForest};
pub use logistic::{LogisticParams, LogisticRegression};
pub use metrics::{evaluate, Metrics};
pub use mlp::{Mlp, MlpParams};
pub use qda::{Qda, QdaParams};
pub use transfer::{transfer_protocol, transfer_protocol_with, TransferRow};
pub use tree::{DecisionTree, MaxFeatures, TreeParams};

use crate::error::{Error, Result};

/// Model family plus its hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ModelParams {
    LogisticRegression(LogisticParams),
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    Mlp(MlpParams),
    #[cfg_attr(feature = "serde", serde(rename = "adaboost"))]
    AdaBoost(AdaBoostParams),
    Qda(QdaParams),
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::LogisticRegression(p) => p.validate(),
            ModelParams::DecisionTree(p) => p.validate(),
            ModelParams::RandomForest(p) => p.validate(),
            ModelParams::Mlp(p) => p.validate(),
            ModelParams::AdaBoost(p) => p.validate(),
            ModelParams::Qda(p) => {
                if p.ridge >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig("qda ridge must be non-negative".into()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub params: ModelParams,
}

impl ModelSpec {
    pub fn new(params: ModelParams, seed: u64) -> Self {
        ModelSpec { seed, params }
    }

    /// Column header used in metric tables.
    pub fn kind_name(&self) -> &'static str {
        match self.params {
            ModelParams::LogisticRegression(_) => "LogisticRegression",
            ModelParams::DecisionTree(_) => "DecisionTree",
            ModelParams::RandomForest(_) => "RandomForest",
            ModelParams::Mlp(_) => "MLP",
            ModelParams::AdaBoost(_) => "AdaBoost",
            ModelParams::Qda(_) => "QDA",
        }
    }

    /// The four models compared on the transcripts task.
    pub fn bias_roster(seed: u64) -> Vec<ModelSpec> {
        alloc::vec![
            ModelSpec::new(ModelParams::RandomForest(ForestParams::default()), seed),
            ModelSpec::new(ModelParams::Mlp(MlpParams::default()), seed),
            ModelSpec::new(ModelParams::DecisionTree(TreeParams::default()), seed),
            ModelSpec::new(ModelParams::LogisticRegression(LogisticParams::default()), seed),
        ]
    }

    /// The four models compared on cascade forecasting.
    pub fn forecast_roster(seed: u64) -> Vec<ModelSpec> {
        alloc::vec![
            ModelSpec::new(ModelParams::RandomForest(ForestParams::default()), seed),
            ModelSpec::new(ModelParams::AdaBoost(AdaBoostParams::default()), seed),
            ModelSpec::new(ModelParams::Mlp(MlpParams::default()), seed),
            ModelSpec::new(ModelParams::Qda(QdaParams::default()), seed),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    LogisticRegression(LogisticRegression),
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    Mlp(Mlp),
    AdaBoost(AdaBoost),
    Qda(Qda),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub model: Model,
    pub feature_names: Vec<String>,
}

impl TrainedModel {
    pub fn new(model: Model, feature_names: Vec<String>) -> Self {
        TrainedModel { model, feature_names }
    }

    /// Scores rows of `x`, whose columns are named by `names`. Columns are
    /// matched by name, so a permuted matrix is accepted; any difference in
    /// the name set is an error.
    pub fn predict_proba(&self, x: &Matrix, names: &[String]) -> Result<Vec<f64>> {
        if names.len() != x.cols() {
            return Err(Error::DimensionMismatch {
                left: names.len(),
                right: x.cols(),
            });
        }
        let reordered;
        let x = if names == self.feature_names.as_slice() {
            x
        } else {
            if names.len() != self.feature_names.len() {
                return Err(dataset::feature_mismatch(&self.feature_names, names));
            }
            let cols = dataset::column_indices(names, &self.feature_names)
                .map_err(|_| dataset::feature_mismatch(&self.feature_names, names))?;
            reordered = x.select_cols(&cols);
            &reordered
        };
        Ok(match &self.model {
            Model::LogisticRegression(m) => m.predict_proba(x),
            Model::DecisionTree(m) => m.predict_proba(x),
            Model::RandomForest(m) => m.predict_proba(x),
            Model::Mlp(m) => m.predict_proba(x),
            Model::AdaBoost(m) => m.predict_proba(x),
            Model::Qda(m) => m.predict_proba(x),
        })
    }

    pub fn predict(&self, x: &Matrix, names: &[String]) -> Result<Vec<u8>> {
        Ok(metrics::hard_labels(&self.predict_proba(x, names)?))
    }
}

/// Checks the sample, feature and class-count preconditions shared by every
/// model family.
pub fn check_trainable(params: &ModelParams, data: &Dataset) -> Result<()> {
    data.validate()?;
    if data.len() < 2 {
        return Err(Error::InvalidDataset(alloc::format!("need at least 2 samples, got {}", data.len())));
    }
    if data.x.cols() == 0 {
        return Err(Error::InvalidDataset("need at least 1 feature".into()));
    }
    let (neg, pos) = data.class_counts();
    match params {
        ModelParams::Qda(_) if neg < 2 || pos < 2 => Err(Error::InvalidDataset(alloc::format!(
            "qda needs at least 2 samples per class, got {neg} negative and {pos} positive"
        ))),
        _ if neg == 0 || pos == 0 => Err(Error::SingleClass),
        _ => Ok(()),
    }
}

pub fn fit(spec: &ModelSpec, data: &Dataset) -> Result<TrainedModel> {
    spec.params.validate()?;
    check_trainable(&spec.params, data)?;
    let (x, y) = (&data.x, data.y.as_slice());
    let model = match &spec.params {
        ModelParams::LogisticRegression(p) => Model::LogisticRegression(LogisticRegression::fit(x, y, p)?),
        ModelParams::DecisionTree(p) => Model::DecisionTree(DecisionTree::fit(x, y, p, spec.seed)?),
        ModelParams::RandomForest(p) => Model::RandomForest(RandomForest::fit(x, y, p, spec.seed)?),
        ModelParams::Mlp(p) => Model::Mlp(Mlp::fit(x, y, p, spec.seed)?),
        ModelParams::AdaBoost(p) => Model::AdaBoost(AdaBoost::fit(x, y, p)?),
        ModelParams::Qda(p) => Model::Qda(Qda::fit(x, y, p)?),
    };
    Ok(TrainedModel::new(model, data.feature_names.clone()))
}
