use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("empty party corpus: no {0} speeches")]
    EmptyPartyCorpus(&'static str),
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("empty effective vocabulary (no token reaches min_count {0})")]
    EmptyVocabulary(u32),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("covariance matrix for class {0} is singular after ridge")]
    SingularCovariance(u8),
    #[error("feature mismatch: missing {missing:?}, unexpected {unexpected:?}")]
    FeatureMismatch {
        missing: Vec<String>,
        unexpected: Vec<String>,
    },
    #[error("parent cycle detected: {0:?}")]
    Cycle(Vec<String>),
    #[error("no eligible cascades ({excluded} excluded)")]
    NoEligibleCascades { excluded: usize },
    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
