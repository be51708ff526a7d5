//! Corpus engineering for multi-bridge multilingual NMT.
//!
//! The crate covers the data side of training a many-to-many model that sees
//! direct non-English pairs next to English-centric ones:
//!
//! * [`corpus`]: languages, sentence pairs, bitext files and training manifests.
//! * [`pivot`]: mining X–Y bitext by joining English-centric corpora on their
//!   shared English side, plus the pair-count statistics matrix.
//! * [`sampler`]: the SamplePairs / SampleFraction / TrainAll regimes and
//!   validation subsampling, all driven by a pinned seeded generator.
//! * [`script`]: Unicode normalization, Indic ↔ Devanagari transliteration and
//!   punctuation tokenization.
//! * [`bpe`]: byte-pair-encoding subword learning and segmentation.
//! * [`tagger`]: source/target language control tokens.
//! * [`metrics`]: BLEU, chrF2, embedding cosine and n-way comparison tables.
//! * [`pipeline`]: end-to-end orchestration driven by a TOML config.

pub mod bpe;
pub mod corpus;
pub mod metrics;
pub mod pipeline;
pub mod pivot;
pub mod sampler;
pub mod script;
pub mod tagger;

pub use corpus::{
    BitextCorpus, LanguageCode, LanguagePair, LanguageRegistry, Script, SentencePair,
    TrainingManifest, TranslationDirection,
};
