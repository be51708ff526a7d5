//! Corpus-level BLEU and chrF2, embedding cosine similarity, and n-way
//! comparison tables.

mod bleu;
mod chrf;
mod compare;
mod embed;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bleu::{bleu, bleu_stats, BleuStats, BleuTokenize, BLEU_NGRAM_ORDER};
pub use chrf::{chrf2, chrf_stats, ChrfStats, CHRF_BETA, CHRF_ORDER};
pub use compare::{nway_compare, ComparisonRow, ComparisonTable, EvalReport};
pub use embed::{cosine, cosine_batch, sentence_cosines, EmbeddingTable};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("reference {0} is empty")]
    EmptyReference(usize),
    #[error("embedding dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("embedding {0:?} has zero norm")]
    ZeroNormVector(String),
    #[error("embedding {0:?} has a non-finite entry")]
    NonFinite(String),
    #[error("more than one report for direction {0}")]
    DuplicateReport(crate::corpus::TranslationDirection),
    #[error("embedding tables cover different sentence ids (first difference: {0:?})")]
    IdMismatch(String),
    #[error("{path}:{line}: {reason}")]
    MalformedEmbeddings {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bleu,
    Chrf2,
    Cosine,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Bleu, Metric::Chrf2, Metric::Cosine];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Bleu => "bleu",
            Metric::Chrf2 => "chrf2",
            Metric::Cosine => "cosine",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bleu" => Ok(Metric::Bleu),
            "chrf2" | "chrf" => Ok(Metric::Chrf2),
            "cosine" | "labse" => Ok(Metric::Cosine),
            _ => Err(format!("unknown metric {s:?}: expected bleu, chrf2 or cosine")),
        }
    }
}

/// A score on the 0..100 scale (cosine: -100..100) plus the configuration
/// string that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub metric: Metric,
    pub value: f64,
    pub signature: String,
}

impl MetricScore {
    /// Value rounded to one decimal, as reported in tables.
    pub fn rounded(&self) -> f64 {
        (self.value * 10.0).round() / 10.0
    }
}

impl fmt::Display for MetricScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {:.1}", self.signature, self.value)
    }
}

pub(crate) fn is_py_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1C}'..='\u{1F}').contains(&c)
}

pub(crate) fn py_split(s: &str) -> impl Iterator<Item = &str> {
    s.split(is_py_space).filter(|t| !t.is_empty())
}

fn check_lengths<H, R>(hyps: &[H], refs: &[R]) -> Result<(), MetricError> {
    if hyps.len() != refs.len() {
        return Err(MetricError::LengthMismatch {
            hyps: hyps.len(),
            refs: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(())
}
