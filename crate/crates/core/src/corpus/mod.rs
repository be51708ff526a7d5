//! Data model and file I/O shared by every stage.

mod bitext;
mod language;
mod manifest;

use std::path::PathBuf;

use thiserror::Error;

pub use bitext::{load_bitext, read_tsv, write_bitext, write_tsv, BitextCorpus, SentencePair};
pub use language::{LanguageCode, LanguagePair, LanguageRegistry, Script, TranslationDirection};
pub use manifest::{ManifestEntry, TrainingManifest};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line count mismatch: source has {0} lines, target has {1}")]
    LineCountMismatch(usize, usize),
    #[error("{path}:{line}: invalid UTF-8")]
    InvalidUtf8 { path: PathBuf, line: usize },
    #[error("{path}:{line}: empty or whitespace-only line")]
    EmptyLine { path: PathBuf, line: usize },
    #[error("{path}:{line}: expected exactly two tab-separated columns")]
    MalformedTsv { path: PathBuf, line: usize },
    #[error("sentence text is empty after trimming")]
    EmptyText,
    #[error("sentence text contains a line break")]
    EmbeddedNewline,
    #[error("sentence {index} contains a tab and cannot be written as TSV")]
    TabInText { index: usize },
    #[error("invalid language code {0:?}: expected two lowercase ASCII letters")]
    InvalidLanguageCode(String),
    #[error("language {0:?} is not in the language registry")]
    UnknownLanguage(String),
    #[error("source and target language are both {0}")]
    SameLanguage(LanguageCode),
    #[error("invalid language pair {0:?}: expected xx-yy")]
    InvalidPair(String),
    #[error("invalid language registry: {0}")]
    InvalidRegistry(String),
    #[error("duplicate direction {0} in manifest")]
    DuplicateDirection(TranslationDirection),
    #[error("{path}: manifest says {expected} lines, file has {actual}")]
    CountMismatch {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },
    #[error("manifest JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CorpusError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.into(),
            source,
        }
    }
}
