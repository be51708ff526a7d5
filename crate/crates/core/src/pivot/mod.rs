//! Mining non-English bitext through a shared English pivot.
//!
//! Given `(s_x, s_en)` and `(s_y, s_en)` from two English-centric corpora,
//! every `(s_x, s_y)` whose English sides agree after [`normalize_pivot`] is
//! emitted. The index is built once and is read-only afterwards, so pairs can
//! be mined in parallel.

mod index;
mod stats;

use std::fmt;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::corpus::{CorpusError, LanguageCode, TranslationDirection};

pub use index::{
    build_pivot_index, mine_all, mine_pairs, mine_pairs_with, MinedCorpus, MinedSet,
    MiningConfig, PivotIndex, DEFAULT_XPROD_CAP,
};
pub use stats::{extraction_stats, ExtractionStats, StatsMatrix};

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("corpus {0} has no side in the pivot language")]
    NonPivotCorpus(TranslationDirection),
    #[error("{0} is the pivot language and cannot be mined against")]
    PivotLanguageRequested(LanguageCode),
    #[error("cannot mine a language against itself ({0})")]
    SameLanguage(LanguageCode),
    #[error("need at least two non-pivot languages, got {0}")]
    TooFewLanguages(usize),
    #[error("statistics matrix is not {0}")]
    InvalidMatrix(String),
    #[error("malformed statistics table: {0}")]
    MalformedTable(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// Join key for English pivot sentences: NFC, trimmed, whitespace runs
/// collapsed to one space. Case is preserved.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PivotKey(String);

impl PivotKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for PivotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for PivotKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn normalize_pivot(text: &str) -> PivotKey {
    let nfc: String = text.nfc().collect();
    let mut key = String::with_capacity(nfc.len());
    for word in nfc.split_whitespace() {
        if !key.is_empty() {
            key.push(' ');
        }
        key.push_str(word);
    }
    PivotKey(key)
}
