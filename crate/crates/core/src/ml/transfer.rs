//! Train on one corpus, evaluate on another.

use alloc::string::String;
use alloc::vec::Vec;

use super::dataset::{feature_mismatch, Dataset};
use super::metrics::{evaluate, Metrics};
use super::{fit, ModelSpec, TrainedModel};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransferRow {
    pub model: String,
    pub metrics: Metrics,
}

/// Fits every spec on `train` and scores it on `test`.
pub fn transfer_protocol(train: &Dataset, test: &Dataset, specs: &[ModelSpec]) -> Result<Vec<TransferRow>> {
    transfer_protocol_with(train, test, specs, fit)
}

/// [`transfer_protocol`] with a caller-supplied fitting routine. The routine
/// only ever receives `train`.
pub fn transfer_protocol_with<F>(train: &Dataset, test: &Dataset, specs: &[ModelSpec], mut fit_fn: F) -> Result<Vec<TransferRow>>
where
    F: FnMut(&ModelSpec, &Dataset) -> Result<TrainedModel>,
{
    if train.feature_names != test.feature_names {
        return Err(feature_mismatch(&train.feature_names, &test.feature_names));
    }
    train.validate()?;
    test.validate()?;
    specs
        .iter()
        .map(|spec| {
            let model = fit_fn(spec, train)?;
            let scores = model.predict_proba(&test.x, &test.feature_names)?;
            Ok(TransferRow {
                model: String::from(spec.kind_name()),
                metrics: evaluate(&test.y, &scores)?,
            })
        })
        .collect()
}
