//! Script unification and tokenization.
//!
//! Indic text is normalized, mapped into the Devanagari block so every
//! language shares one subword inventory, and split on punctuation. English
//! goes through the 13a rule set.

mod normalize;
mod tokenize;
mod translit;

use thiserror::Error;

use crate::corpus::LanguageCode;

pub use normalize::{normalize_unicode, NUKTA_DECOMPOSITIONS};
pub use tokenize::{detokenize, tokenize, tokenize_13a, tokenize_indic};
pub use translit::{
    from_devanagari, from_devanagari_with, is_assigned, to_devanagari, NoCounterpart, ScriptMap,
    UnmappablePolicy, COORDINATED_RANGE_END, SHARED_PUNCTUATION,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScriptError {
    #[error("language {0} has no Brahmic script block")]
    UnsupportedLanguage(LanguageCode),
    #[error("U+{codepoint:04X} at char {position} has no counterpart in {lang}")]
    UnmappableCodepoint {
        codepoint: u32,
        position: usize,
        lang: LanguageCode,
    },
}
