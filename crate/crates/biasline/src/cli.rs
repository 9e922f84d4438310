//! Command-line entry point.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::pipeline::{self, Outputs};

#[derive(Debug, Parser)]
#[command(name = "biasline", version, about = "Political bias labeling, transfer evaluation and cascade shift forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Pipeline configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Single-threaded, bit-reproducible run.
    #[arg(long)]
    pub deterministic: bool,
    /// Overrides the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every post and summarize each forum.
    Label(Common),
    /// Compare forum and party embedding centroids.
    Validate(Common),
    /// Train bias classifiers on one corpus and test on another.
    Predict(Common),
    /// Forecast bias shifts in reply cascades.
    Forecast(Common),
    /// Export cascade structure, or write the synthetic corpus with --synth.
    Cascades {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        synth: bool,
    },
    /// Export the party TF-IDF table.
    Tfidf(Common),
    /// Train and save an embedding model.
    EmbedTrain(Common),
}

impl Common {
    pub fn load(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.deterministic {
            cfg.deterministic = true;
        }
        if let Some(out) = &self.out {
            // relative to the working directory, unlike config paths
            cfg.out_dir = std::env::current_dir().map_err(|e| Error::io(".", e))?.join(out);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn execute(command: &Command) -> Result<Outputs> {
    match command {
        Command::Label(c) => pipeline::cmd_label(&c.load()?),
        Command::Validate(c) => pipeline::cmd_validate(&c.load()?),
        Command::Predict(c) => pipeline::cmd_predict(&c.load()?),
        Command::Forecast(c) => pipeline::cmd_forecast(&c.load()?),
        Command::Cascades { common, synth: true } => pipeline::cmd_synth(&common.load()?),
        Command::Cascades { common, synth: false } => pipeline::cmd_cascades(&common.load()?),
        Command::Tfidf(c) => pipeline::cmd_tfidf(&c.load()?),
        Command::EmbedTrain(c) => pipeline::cmd_embed_train(&c.load()?),
    }
}

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
