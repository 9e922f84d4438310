//! TOML pipeline configuration.
//!
//! Relative paths resolve against the directory holding the config file. The
//! global `seed` drives every random component: it replaces the embedding
//! and synthetic-corpus seeds, and each model's own `seed` is added to it as
//! an offset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use biasline_core::bias::Normalization;
use biasline_core::cascade::ForecastConfig;
use biasline_core::embed::EmbeddingConfig;
use biasline_core::ml::ModelSpec;
use biasline_core::synth::SynthConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_text, resolve, LoadMode};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub speeches: Option<PathBuf>,
    /// Forum name to posts file.
    pub posts: BTreeMap<String, PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub negators: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub media_bias: Option<PathBuf>,
    /// Pretrained embedding model; when absent, embeddings are trained.
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntityConfig {
    pub min_forum_freq: usize,
    pub normalization: Normalization,
}

impl Default for EntityConfig {
    fn default() -> Self {
        EntityConfig {
            min_forum_freq: 100,
            normalization: Normalization::Mean,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Train on speeches, test on each target forum.
    #[default]
    TranscriptsToForum,
    /// Train on the source forum, test on the target forum.
    ForumToForum,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeechLabel {
    /// Binarized bias score of the speech text.
    #[default]
    Gamma,
    /// Speaker party (republican = 1).
    Party,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictConfig {
    pub protocol: Protocol,
    pub source: Option<String>,
    /// Forums to test on; all configured forums when empty.
    pub targets: Vec<String>,
    pub include_party_flag: bool,
    /// Keep only texts with at least one scoreable entity.
    pub scoreable_only: bool,
    pub speech_label: SpeechLabel,
    /// Defaults to the four-model bias roster.
    pub models: Vec<ModelSpec>,
}

impl Default for PredictConfig {
    fn default() -> Self {
        PredictConfig {
            protocol: Protocol::TranscriptsToForum,
            source: None,
            targets: Vec::new(),
            include_party_flag: false,
            scoreable_only: true,
            speech_label: SpeechLabel::Gamma,
            models: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForecastSection {
    pub min_levels: usize,
    pub train_levels: usize,
    pub shift_epsilon: f64,
    /// Forum whose posts form cascades; all forums when absent.
    pub forum: Option<String>,
    /// Use the synthetic generator instead of configured corpora.
    pub synthetic: bool,
    pub test_fraction: f64,
    /// Defaults to the four-model forecasting roster.
    pub models: Vec<ModelSpec>,
}

impl Default for ForecastSection {
    fn default() -> Self {
        let f = ForecastConfig::default();
        ForecastSection {
            min_levels: f.min_levels,
            train_levels: f.train_levels,
            shift_epsilon: f.shift_epsilon,
            forum: None,
            synthetic: false,
            test_fraction: 0.2,
            models: Vec::new(),
        }
    }
}

impl ForecastSection {
    pub fn forecast_config(&self) -> ForecastConfig {
        ForecastConfig {
            min_levels: self.min_levels,
            train_levels: self.train_levels,
            shift_epsilon: self.shift_epsilon,
        }
    }
}

fn default_seed() -> u64 {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub load_mode: LoadMode,
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub entities: EntityConfig,
    #[serde(default)]
    pub embedding: EmbeddingConfig,
    #[serde(default)]
    pub predict: PredictConfig,
    #[serde(default)]
    pub forecast: ForecastSection,
    #[serde(default)]
    pub synth: SynthConfig,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config parses")
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path).map_err(|e| Error::Config(e.to_string()))?;
        let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
        Self::from_toml(&text, &base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn path(&self, p: &Path) -> PathBuf {
        resolve(&self.base_dir, p)
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.path(&self.out_dir).join(name)
    }

    /// Resolved path of a required input, which must exist.
    pub fn require(&self, p: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
        let p = p.as_ref().ok_or_else(|| Error::Config(format!("paths.{what} is not set")))?;
        self.existing(p, what)
    }

    pub fn existing(&self, p: &Path, what: &str) -> Result<PathBuf> {
        let full = self.path(p);
        if !full.exists() {
            return Err(Error::Config(format!("{what} path {} does not exist", full.display())));
        }
        Ok(full)
    }

    /// Resolved optional input; set but missing is an error.
    pub fn optional(&self, p: &Option<PathBuf>, what: &str) -> Result<Option<PathBuf>> {
        p.as_ref().map(|p| self.existing(p, what)).transpose()
    }

    pub fn forum_paths(&self) -> Result<Vec<(String, PathBuf)>> {
        self.paths
            .posts
            .iter()
            .map(|(name, p)| Ok((name.clone(), self.existing(p, &format!("posts.{name}"))?)))
            .collect()
    }

    pub fn embedding_config(&self) -> EmbeddingConfig {
        EmbeddingConfig {
            seed: self.seed,
            ..self.embedding.clone()
        }
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            seed: self.seed,
            ..self.synth.clone()
        }
    }

    fn seeded(&self, specs: &[ModelSpec], fallback: fn(u64) -> Vec<ModelSpec>) -> Vec<ModelSpec> {
        if specs.is_empty() {
            return fallback(self.seed);
        }
        specs
            .iter()
            .map(|s| ModelSpec {
                seed: self.seed.wrapping_add(s.seed),
                ..s.clone()
            })
            .collect()
    }

    pub fn predict_models(&self) -> Vec<ModelSpec> {
        self.seeded(&self.predict.models, ModelSpec::bias_roster)
    }

    pub fn forecast_models(&self) -> Vec<ModelSpec> {
        self.seeded(&self.forecast.models, ModelSpec::forecast_roster)
    }

    /// Checks value ranges that do not depend on the filesystem.
    pub fn validate(&self) -> Result<()> {
        if self.entities.min_forum_freq == 0 {
            return Err(Error::Config("entities.min_forum_freq must be at least 1".into()));
        }
        self.embedding_config().validate().map_err(|e| Error::Config(e.to_string()))?;
        self.forecast.forecast_config().validate().map_err(|e| Error::Config(e.to_string()))?;
        if !(self.forecast.test_fraction > 0.0 && self.forecast.test_fraction < 1.0) {
            return Err(Error::Config("forecast.test_fraction must be in (0, 1)".into()));
        }
        for spec in self.predict.models.iter().chain(&self.forecast.models) {
            spec.params.validate().map_err(|e| Error::Config(format!("model {}: {e}", spec.kind_name())))?;
        }
        Ok(())
    }
}
