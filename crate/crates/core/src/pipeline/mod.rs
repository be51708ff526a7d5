//! End-to-end orchestration: extract → stats → sample → preprocess →
//! learn-bpe → apply-bpe → tag, driven by one TOML config.
//!
//! Every stage is also callable on its own; the CLI subcommands are thin
//! wrappers over the functions here.

mod config;
mod run;
mod stages;

use std::path::PathBuf;

use thiserror::Error;

use crate::bpe::BpeError;
use crate::corpus::CorpusError;
use crate::metrics::MetricError;
use crate::pivot::MiningError;
use crate::sampler::SamplingError;
use crate::script::ScriptError;
use crate::tagger::TagError;

pub use config::{
    DevSettings, EvalSettings, ExtractSettings, LanguageSettings, PathSettings, PipelineConfig,
    PreprocessSettings, ResolvedPaths,
};
pub use run::{run_pipeline, BpeSummary, MinedSummary, RunReport, SplitSummary, StatsSummary};
pub use stages::{
    apply_bpe_file, discover_bitext, extract, load_mined, preprocess_file, preprocess_line,
    tag_file, write_mined, write_stats, CAPPED_KEYS_FILE, RAW_COUNTS_FILE,
};

/// Failure inside one stage.
#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Mining(#[from] MiningError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Bpe(#[from] BpeError),
    #[error(transparent)]
    Tag(#[from] TagError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("{path}: {reason}")]
    Layout { path: PathBuf, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl StageError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        StageError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn layout(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        StageError::Layout {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: StageError,
    },
}

pub(crate) trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T, PipelineError>;
}

impl<T, E: Into<StageError>> StageContext<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, PipelineError> {
        self.map_err(|e| PipelineError::Stage {
            stage,
            source: e.into(),
        })
    }
}
