use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stages::{
    apply_bpe_file, discover_bitext, extract, preprocess_file, tag_file, write_mined, write_stats,
};
use super::{PipelineConfig, PipelineError, ResolvedPaths, StageContext, StageError};
use crate::bpe::{learn_bpe, BpeModel};
use crate::corpus::{
    BitextCorpus, LanguageCode, LanguageRegistry, ManifestEntry, TrainingManifest,
};
use crate::pivot::{build_pivot_index, extraction_stats, MinedSet};
use crate::sampler::{assemble_training_set, sample_validation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinedSummary {
    pub pair: String,
    pub pairs: u64,
    pub raw_pairs: u64,
    pub capped_keys: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub english_total: u64,
    pub grand_total: u64,
    pub unique_pairs: u64,
    pub raw_grand_total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub directions: usize,
    pub total_pairs: u64,
    pub non_pivot_pairs: u64,
    pub subword_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpeSummary {
    pub merges: usize,
    pub vocab_size: usize,
}

/// Counts from every stage. Contains no timings, so identical inputs give an
/// identical report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub pivot: LanguageCode,
    pub languages: Vec<LanguageCode>,
    pub strategy: String,
    pub english_corpora: Vec<(String, u64)>,
    pub mined: Vec<MinedSummary>,
    pub stats: StatsSummary,
    pub train: SplitSummary,
    pub valid: Option<SplitSummary>,
    pub bpe: BpeSummary,
    /// Files under the work directory, relative and sorted.
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs every stage in order. The config is validated before any file is
/// read or written.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let (registry, pivot) = config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| PipelineError::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| Runner::new(config, registry, pivot).run())
}

struct Runner<'a> {
    config: &'a PipelineConfig,
    registry: LanguageRegistry,
    pivot: LanguageCode,
    paths: ResolvedPaths,
}

fn timed<T>(stage: &str, f: impl FnOnce() -> Result<T, PipelineError>) -> Result<T, PipelineError> {
    let start = Instant::now();
    let out = f()?;
    log::info!("stage={stage} status=done elapsed_ms={}", start.elapsed().as_millis());
    Ok(out)
}

/// `(prefix, lang)` for every distinct file behind a manifest.
fn manifest_files(m: &TrainingManifest) -> Vec<(String, LanguageCode)> {
    let set: BTreeSet<(String, LanguageCode)> = m
        .entries
        .iter()
        .flat_map(|e| [(e.path.clone(), e.src), (e.path.clone(), e.tgt)])
        .collect();
    set.into_iter().collect()
}

fn side(root: &Path, prefix: &str, lang: LanguageCode) -> PathBuf {
    root.join(format!("{prefix}.{lang}"))
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<String>) -> Result<(), StageError> {
    for entry in fs::read_dir(dir).map_err(|e| StageError::io(dir, e))? {
        let entry = entry.map_err(|e| StageError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if let Ok(rel) = path.strip_prefix(root) {
            let parts: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}

impl<'a> Runner<'a> {
    fn new(config: &'a PipelineConfig, registry: LanguageRegistry, pivot: LanguageCode) -> Self {
        Runner {
            paths: config.paths(),
            config,
            registry,
            pivot,
        }
    }

    fn run(&self) -> Result<RunReport, PipelineError> {
        let english = timed("load", || {
            let english = discover_bitext(&self.paths.raw, &self.registry).stage("load")?;
            if english.is_empty() {
                return Err(PipelineError::Stage {
                    stage: "load",
                    source: StageError::layout(&self.paths.raw, "no <a>-<b>.<a> bitext files found"),
                });
            }
            Ok(english)
        })?;
        let dev = match &self.config.dev {
            Some(d) => Some(discover_bitext(&d.path, &self.registry).stage("load")?),
            None => None,
        };
        let languages: Vec<LanguageCode> = english
            .iter()
            .flat_map(|c| [c.src_lang(), c.tgt_lang()])
            .filter(|l| *l != self.pivot)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let mined = timed("extract", || self.extract(&english, &languages))?;
        let stats = timed("stats", || {
            let stats = extraction_stats(self.pivot, &english, &mined).stage("stats")?;
            write_stats(&stats, &self.paths.stats).stage("stats")?;
            Ok(stats)
        })?;
        let (train, valid) = timed("sample", || self.sample(&english, &mined, dev.as_deref()))?;

        let mut splits = vec![("train", &train)];
        if let Some(v) = &valid {
            splits.push(("valid", v));
        }
        timed("preprocess", || self.preprocess(&splits))?;
        let model = timed("learn-bpe", || self.learn(&train))?;
        let tokens = timed("apply-bpe", || self.apply(&model, &splits))?;
        timed("tag", || self.tag(&splits))?;

        let split_summary = |m: &TrainingManifest, subword_tokens: u64| SplitSummary {
            directions: m.entries.len(),
            total_pairs: m.total_pairs(),
            non_pivot_pairs: m
                .entries
                .iter()
                .filter(|e| e.src != self.pivot && e.tgt != self.pivot)
                .map(|e| e.count)
                .sum(),
            subword_tokens,
        };
        let mut outputs = Vec::new();
        collect_files(&self.paths.work, &self.paths.work, &mut outputs).stage("report")?;
        let report_name = "run_report.json";
        outputs.retain(|f| f != report_name);
        outputs.sort();

        let report = RunReport {
            seed: self.config.seed,
            pivot: self.pivot,
            languages,
            strategy: self.config.sampling.label().to_string(),
            english_corpora: english
                .iter()
                .map(|c| (c.direction().to_string(), c.len() as u64))
                .collect(),
            mined: mined
                .iter()
                .map(|(p, m)| MinedSummary {
                    pair: p.to_string(),
                    pairs: m.corpus.len() as u64,
                    raw_pairs: m.raw_pairs,
                    capped_keys: m.capped_keys.len(),
                })
                .collect(),
            stats: StatsSummary {
                english_total: stats.deduplicated.english_total(),
                grand_total: stats.deduplicated.grand_total(),
                unique_pairs: stats.deduplicated.unique_pairs(),
                raw_grand_total: stats.raw.grand_total(),
            },
            train: split_summary(&train, tokens[0]),
            valid: valid.as_ref().map(|v| split_summary(v, tokens[1])),
            bpe: BpeSummary {
                merges: model.merges().len(),
                vocab_size: model.vocab().map_or(0, |v| v.len()),
            },
            outputs,
        };
        fs::write(&self.paths.report, report.to_json())
            .map_err(|e| StageError::io(&self.paths.report, e))
            .stage("report")?;
        Ok(report)
    }

    fn extract(&self, english: &[BitextCorpus], languages: &[LanguageCode]) -> Result<MinedSet, PipelineError> {
        let index = build_pivot_index(english, self.pivot).stage("extract")?;
        let mined = extract(&index, languages, None, &self.config.extract.mining_config())
            .stage("extract")?;
        write_mined(&mined, &self.paths.mined).stage("extract")?;
        Ok(mined)
    }

    fn sample(
        &self,
        english: &[BitextCorpus],
        mined: &MinedSet,
        dev: Option<&[BitextCorpus]>,
    ) -> Result<(TrainingManifest, Option<TrainingManifest>), PipelineError> {
        let dir = &self.paths.sampled;
        let dataset =
            assemble_training_set(self.pivot, english, mined, &self.config.plan()).stage("sample")?;
        let train = dataset.write(dir, "train").stage("sample")?;
        train.save(dir.join("manifest.json")).stage("sample")?;
        train.verify_counts(dir).stage("sample")?;
        let valid = match (dev, &self.config.dev) {
            (Some(dev), Some(settings)) => {
                let vs = sample_validation(dev, settings.fraction, self.config.seed).stage("sample")?;
                let m = vs.write(dir, "valid").stage("sample")?;
                m.save(dir.join("valid_manifest.json")).stage("sample")?;
                Some(m)
            }
            _ => None,
        };
        Ok((train, valid))
    }

    fn preprocess(&self, splits: &[(&str, &TrainingManifest)]) -> Result<(), PipelineError> {
        let devanagari = self.config.preprocess.to_devanagari;
        let files: Vec<(String, LanguageCode)> =
            splits.iter().flat_map(|(_, m)| manifest_files(m)).collect();
        files
            .par_iter()
            .map(|(prefix, lang)| {
                let n = preprocess_file(
                    &side(&self.paths.sampled, prefix, *lang),
                    &side(&self.paths.preprocessed, prefix, *lang),
                    *lang,
                    devanagari,
                )?;
                log::debug!("stage=preprocess file={prefix}.{lang} lines={n}");
                Ok(())
            })
            .collect::<Result<Vec<()>, StageError>>()
            .stage("preprocess")?;
        Ok(())
    }

    fn learn(&self, train: &TrainingManifest) -> Result<BpeModel, PipelineError> {
        let mut lines = Vec::new();
        for (prefix, lang) in manifest_files(train) {
            let path = side(&self.paths.preprocessed, &prefix, lang);
            let text = fs::read_to_string(&path).map_err(|e| StageError::io(&path, e)).stage("learn-bpe")?;
            lines.extend(text.lines().map(str::to_string));
        }
        let model = learn_bpe(&lines, &self.config.bpe).stage("learn-bpe")?;
        log::info!(
            "stage=learn-bpe merges={} vocab={}",
            model.merges().len(),
            model.vocab().map_or(0, |v| v.len())
        );
        model.save(&self.paths.bpe.join("codes.txt")).stage("learn-bpe")?;
        Ok(model)
    }

    fn apply(&self, model: &BpeModel, splits: &[(&str, &TrainingManifest)]) -> Result<Vec<u64>, PipelineError> {
        let mut totals = Vec::new();
        for (_, m) in splits {
            let files = manifest_files(m);
            let counts = files
                .par_iter()
                .map(|(prefix, lang)| {
                    apply_bpe_file(
                        model,
                        &side(&self.paths.preprocessed, prefix, *lang),
                        &side(&self.paths.bpe, prefix, *lang),
                    )
                })
                .collect::<Result<Vec<usize>, StageError>>()
                .stage("apply-bpe")?;
            totals.push(counts.iter().map(|c| *c as u64).sum());
        }
        totals.resize(2, 0);
        Ok(totals)
    }

    fn tag(&self, splits: &[(&str, &TrainingManifest)]) -> Result<(), PipelineError> {
        for (split, m) in splits {
            let entries: Vec<ManifestEntry> = m
                .entries
                .par_iter()
                .map(|e| {
                    let dir = format!("{split}/{}-{}", e.src, e.tgt);
                    tag_file(
                        &side(&self.paths.bpe, &e.path, e.src),
                        &side(&self.paths.tagged, &dir, e.src),
                        e.src,
                        e.tgt,
                    )?;
                    let target = side(&self.paths.tagged, &dir, e.tgt);
                    let source = side(&self.paths.bpe, &e.path, e.tgt);
                    fs::copy(&source, &target).map_err(|err| StageError::io(&source, err))?;
                    Ok(ManifestEntry {
                        path: dir,
                        ..e.clone()
                    })
                })
                .collect::<Result<_, StageError>>()
                .stage("tag")?;
            let manifest = TrainingManifest {
                entries,
                seed: m.seed,
            };
            let name = if *split == "train" { "manifest.json" } else { "valid_manifest.json" };
            manifest.save(self.paths.tagged.join(name)).stage("tag")?;
        }
        Ok(())
    }
}
