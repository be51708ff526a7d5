//! Training-set construction under the three non-English data regimes, and
//! per-direction validation subsampling.
//!
//! English-centric corpora always enter in full and in both directions. The
//! non-English part is either a spanning subset of pairs used in full
//! (`SamplePairs`), a capped sample of every pair (`SampleFraction`), or
//! everything (`TrainAll`). All sampling preserves input order.

mod rng;
mod spanning;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    write_bitext, BitextCorpus, CorpusError, LanguageCode, LanguagePair, ManifestEntry,
    TrainingManifest, TranslationDirection,
};
use crate::pivot::MinedSet;

pub use rng::{derive_seed, SeededRng};
pub use spanning::{select_spanning_pairs, spans_all, uncovered_languages, validate_spanning};

/// Per-pair cap used by `SampleFraction` unless configured otherwise.
pub const DEFAULT_PER_PAIR: usize = 100_000;

/// Strategy label recorded in manifests for English-centric entries.
pub const ENGLISH_CENTRIC_LABEL: &str = "english-centric";

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("{requested} pairs cannot span {languages} languages")]
    InfeasibleSpan { languages: usize, requested: usize },
    #[error("pairs leave languages uncovered: {0:?}")]
    NotSpanning(Vec<LanguageCode>),
    #[error("plan references pair {0}, which was not mined")]
    MissingCorpus(LanguagePair),
    #[error("invalid sampling plan: {0}")]
    InvalidPlan(String),
    #[error("validation fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
    #[error("direction {0} appears more than once")]
    DuplicateDirection(TranslationDirection),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum SamplingStrategy {
    SamplePairs { pairs: Vec<LanguagePair> },
    SampleFraction { per_pair_target: usize },
    TrainAll,
}

impl SamplingStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            SamplingStrategy::SamplePairs { .. } => "sample-pairs",
            SamplingStrategy::SampleFraction { .. } => "sample-fraction",
            SamplingStrategy::TrainAll => "train-all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub strategy: SamplingStrategy,
    pub seed: u64,
}

impl SamplingPlan {
    pub fn new(strategy: SamplingStrategy, seed: u64) -> Self {
        SamplingPlan { strategy, seed }
    }

    /// English-centric data is never sampled.
    pub fn always_include_english_centric(&self) -> bool {
        true
    }

    pub fn validate(&self, pivot: LanguageCode) -> Result<(), SamplingError> {
        match &self.strategy {
            SamplingStrategy::SamplePairs { pairs } => {
                if let Some(p) = pairs.iter().find(|p| p.contains(pivot)) {
                    return Err(SamplingError::InvalidPlan(format!(
                        "SamplePairs lists {p}, which involves the pivot"
                    )));
                }
            }
            SamplingStrategy::SampleFraction { per_pair_target } => {
                if *per_pair_target == 0 {
                    return Err(SamplingError::InvalidPlan(
                        "SampleFraction target must be positive".into(),
                    ));
                }
            }
            SamplingStrategy::TrainAll => {}
        }
        Ok(())
    }
}

/// Uniform sample of exactly `target_n` pairs without replacement, in input
/// order. Corpora no larger than `target_n` come back unchanged.
pub fn sample_fraction(corpus: &BitextCorpus, target_n: usize, seed: u64) -> BitextCorpus {
    if corpus.len() <= target_n {
        return corpus.clone();
    }
    let indices = SeededRng::new(seed).sample_indices(corpus.len(), target_n);
    corpus.select(&indices)
}

/// One direction of a [`Dataset`]. Both directions of a pair share one
/// `Arc`'d corpus stored in its own orientation.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub direction: TranslationDirection,
    pub corpus: Arc<BitextCorpus>,
    pub strategy: String,
}

/// In-memory training or validation set; [`Dataset::write`] lays it out on
/// disk and returns the manifest.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub entries: Vec<DatasetEntry>,
    pub seed: u64,
}

impl Dataset {
    pub fn total_pairs(&self) -> u64 {
        self.entries.iter().map(|e| e.corpus.len() as u64).sum()
    }

    /// Directional pair count excluding entries that touch `pivot`.
    pub fn non_pivot_pairs(&self, pivot: LanguageCode) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.direction.src != pivot && e.direction.tgt != pivot)
            .map(|e| e.corpus.len() as u64)
            .sum()
    }

    pub fn entry(&self, direction: TranslationDirection) -> Option<&DatasetEntry> {
        self.entries.iter().find(|e| e.direction == direction)
    }

    fn prefix(subdir: &str, corpus: &BitextCorpus) -> String {
        format!("{subdir}/{}-{}", corpus.src_lang(), corpus.tgt_lang())
    }

    /// Manifest entries without touching the disk.
    pub fn manifest(&self, subdir: &str) -> TrainingManifest {
        TrainingManifest {
            entries: self
                .entries
                .iter()
                .map(|e| ManifestEntry {
                    src: e.direction.src,
                    tgt: e.direction.tgt,
                    path: Dataset::prefix(subdir, &e.corpus),
                    count: e.corpus.len() as u64,
                    strategy: e.strategy.clone(),
                })
                .collect(),
            seed: self.seed,
        }
    }

    /// Writes each distinct corpus once under `root/subdir` and returns the
    /// manifest, whose paths are relative to `root`.
    pub fn write(&self, root: &Path, subdir: &str) -> Result<TrainingManifest, SamplingError> {
        let mut written: BTreeMap<String, *const BitextCorpus> = BTreeMap::new();
        for entry in &self.entries {
            let prefix = Dataset::prefix(subdir, &entry.corpus);
            let ptr = Arc::as_ptr(&entry.corpus);
            match written.get(&prefix) {
                Some(existing) if *existing == ptr => continue,
                Some(_) => return Err(SamplingError::DuplicateDirection(entry.direction)),
                None => {}
            }
            let c = &entry.corpus;
            write_bitext(
                c,
                root.join(format!("{prefix}.{}", c.src_lang())),
                root.join(format!("{prefix}.{}", c.tgt_lang())),
            )?;
            written.insert(prefix, ptr);
        }
        let manifest = self.manifest(subdir);
        manifest.validate()?;
        Ok(manifest)
    }
}

fn push_both(
    entries: &mut Vec<DatasetEntry>,
    seen: &mut BTreeSet<TranslationDirection>,
    corpus: Arc<BitextCorpus>,
    label: &str,
) -> Result<(), SamplingError> {
    let forward = corpus.direction();
    for direction in [forward, forward.reversed()] {
        if !seen.insert(direction) {
            return Err(SamplingError::DuplicateDirection(direction));
        }
        entries.push(DatasetEntry {
            direction,
            corpus: Arc::clone(&corpus),
            strategy: label.to_string(),
        });
    }
    Ok(())
}

/// English-centric corpora in full plus the plan's share of the mined set.
/// Every selected pair contributes both directions.
pub fn assemble_training_set(
    pivot: LanguageCode,
    english_corpora: &[BitextCorpus],
    mined: &MinedSet,
    plan: &SamplingPlan,
) -> Result<Dataset, SamplingError> {
    plan.validate(pivot)?;
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();

    let mut english: Vec<&BitextCorpus> = english_corpora.iter().collect();
    english.sort_by_key(|c| c.direction());
    for corpus in english {
        if corpus.src_lang() != pivot && corpus.tgt_lang() != pivot {
            return Err(SamplingError::InvalidPlan(format!(
                "{} is not English-centric",
                corpus.direction()
            )));
        }
        push_both(&mut entries, &mut seen, Arc::new(corpus.clone()), ENGLISH_CENTRIC_LABEL)?;
    }

    let label = plan.strategy.label();
    let selected: Vec<Arc<BitextCorpus>> = match &plan.strategy {
        SamplingStrategy::SamplePairs { pairs } => {
            let wanted: BTreeSet<LanguagePair> = pairs.iter().copied().collect();
            wanted
                .into_iter()
                .map(|pair| {
                    mined
                        .get(&pair)
                        .map(|m| Arc::new(m.corpus.clone()))
                        .ok_or(SamplingError::MissingCorpus(pair))
                })
                .collect::<Result<_, _>>()?
        }
        SamplingStrategy::SampleFraction { per_pair_target } => {
            let all: Vec<(&LanguagePair, &BitextCorpus)> =
                mined.iter().map(|(p, m)| (p, &m.corpus)).collect();
            all.par_iter()
                .map(|(pair, corpus)| {
                    let seed = derive_seed(plan.seed, &pair.to_string());
                    Arc::new(sample_fraction(corpus, *per_pair_target, seed))
                })
                .collect()
        }
        SamplingStrategy::TrainAll => mined.iter().map(|(_, m)| Arc::new(m.corpus.clone())).collect(),
    };
    for corpus in selected {
        push_both(&mut entries, &mut seen, corpus, label)?;
    }
    log::info!(
        "stage=sample strategy={label} entries={} pairs={}",
        entries.len(),
        entries.iter().map(|e| e.corpus.len()).sum::<usize>()
    );
    Ok(Dataset {
        entries,
        seed: plan.seed,
    })
}

/// Number of pairs kept from an `n`-line set: `round(fraction * n)`, at least
/// one for non-empty sets.
pub fn validation_size(n: usize, fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    ((fraction * n as f64).round() as usize).clamp(1, n)
}

/// Samples each direction of a dev set independently, keeping order.
pub fn sample_validation(
    dev_corpora: &[BitextCorpus],
    fraction: f64,
    seed: u64,
) -> Result<Dataset, SamplingError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(SamplingError::InvalidFraction(fraction));
    }
    let mut seen = BTreeSet::new();
    let mut entries = Vec::with_capacity(dev_corpora.len());
    let mut sorted: Vec<&BitextCorpus> = dev_corpora.iter().collect();
    sorted.sort_by_key(|c| c.direction());
    for corpus in sorted {
        let direction = corpus.direction();
        if !seen.insert(direction) {
            return Err(SamplingError::DuplicateDirection(direction));
        }
        let k = validation_size(corpus.len(), fraction);
        let indices = SeededRng::new(derive_seed(seed, &format!("valid:{direction}")))
            .sample_indices(corpus.len(), k);
        entries.push(DatasetEntry {
            direction,
            corpus: Arc::new(corpus.select(&indices)),
            strategy: "validation".into(),
        });
    }
    Ok(Dataset { entries, seed })
}
