//! Byte-pair-encoding subword segmentation with `@@` continuation markers.

mod learn;
mod model;

use std::path::PathBuf;

use thiserror::Error;

pub use learn::{learn_bpe, word_counts};
pub use model::{revert_bpe, revert_line, BpeModel, CONTINUATION, END_OF_WORD};

pub const DEFAULT_NUM_MERGES: usize = 32_000;
pub const DEFAULT_MIN_FREQUENCY: u64 = 5;
pub const DEFAULT_MERGE_FLOOR: u64 = 2;

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("no tokens to learn from")]
    EmptyCorpus,
    #[error("subword stream ends with a dangling continuation {0:?}")]
    DanglingContinuation(String),
    #[error("{path}:{line}: {reason}")]
    MalformedModel {
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BpeConfig {
    pub num_merges: usize,
    /// Subwords seen fewer times than this in the segmented training data
    /// are split back into smaller units at apply time.
    pub min_frequency: u64,
    /// Learning stops once the best pair occurs fewer times than this.
    pub merge_floor: u64,
}

impl Default for BpeConfig {
    fn default() -> Self {
        BpeConfig {
            num_merges: DEFAULT_NUM_MERGES,
            min_frequency: DEFAULT_MIN_FREQUENCY,
            merge_floor: DEFAULT_MERGE_FLOOR,
        }
    }
}
