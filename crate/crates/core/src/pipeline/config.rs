use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::bpe::BpeConfig;
use crate::corpus::{LanguageCode, LanguageRegistry};
use crate::metrics::BleuTokenize;
use crate::pivot::{MiningConfig, DEFAULT_XPROD_CAP};
use crate::sampler::{SamplingPlan, SamplingStrategy};

/// Pipeline configuration, usually read from TOML:
///
/// ```toml
/// seed = 13
/// threads = 4
///
/// [languages]
/// pivot = "en"
///
/// [paths]
/// raw = "raw"
/// work = "work"
///
/// [sampling]
/// strategy = "sample-fraction"
/// per_pair_target = 100000
///
/// [bpe]
/// num_merges = 32000
/// min_frequency = 5
/// ```
///
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Worker threads for parallel stages. Never changes outputs.
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub languages: LanguageSettings,
    pub paths: PathSettings,
    #[serde(default)]
    pub extract: ExtractSettings,
    pub sampling: SamplingStrategy,
    #[serde(default)]
    pub preprocess: PreprocessSettings,
    #[serde(default)]
    pub bpe: BpeConfig,
    #[serde(default)]
    pub dev: Option<DevSettings>,
    #[serde(default)]
    pub eval: EvalSettings,
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageSettings {
    /// TOML registry file; the built-in English + Indic registry otherwise.
    pub registry: Option<PathBuf>,
    /// Must match the registry's pivot when given.
    pub pivot: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSettings {
    /// English-centric bitext, `<a>-<b>.<a>` / `<a>-<b>.<b>` per corpus.
    pub raw: PathBuf,
    pub work: PathBuf,
    pub mined: Option<PathBuf>,
    pub sampled: Option<PathBuf>,
    pub preprocessed: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractSettings {
    /// Per-pivot-key cross-product cap; 0 disables it.
    pub xprod_cap: usize,
}

impl Default for ExtractSettings {
    fn default() -> Self {
        ExtractSettings {
            xprod_cap: DEFAULT_XPROD_CAP,
        }
    }
}

impl ExtractSettings {
    pub fn mining_config(&self) -> MiningConfig {
        MiningConfig {
            xprod_cap: (self.xprod_cap > 0).then_some(self.xprod_cap),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessSettings {
    /// Transliterate Indic text into Devanagari before tokenizing.
    pub to_devanagari: bool,
}

impl Default for PreprocessSettings {
    fn default() -> Self {
        PreprocessSettings {
            to_devanagari: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DevSettings {
    /// Directory of English-centric dev bitext, same naming as `raw`.
    pub path: PathBuf,
    #[serde(default = "default_dev_fraction")]
    pub fraction: f64,
}

fn default_dev_fraction() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub tokenize: BleuTokenize,
}

/// Every directory a run reads or writes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedPaths {
    pub raw: PathBuf,
    pub work: PathBuf,
    pub mined: PathBuf,
    pub stats: PathBuf,
    pub sampled: PathBuf,
    pub preprocessed: PathBuf,
    pub bpe: PathBuf,
    pub tagged: PathBuf,
    pub report: PathBuf,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, PipelineError> {
        let mut config: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config {
            path: base_dir.to_path_buf(),
            reason: e.to_string(),
        })?;
        config.rebase(base_dir);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        PipelineConfig::from_toml(&text, base).map_err(|e| match e {
            PipelineError::Config { reason, .. } => PipelineError::Config {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        })
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.paths.raw);
        fix(&mut self.paths.work);
        for p in [
            &mut self.paths.mined,
            &mut self.paths.sampled,
            &mut self.paths.preprocessed,
            &mut self.languages.registry,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        if let Some(dev) = &mut self.dev {
            fix(&mut dev.path);
        }
    }

    pub fn paths(&self) -> ResolvedPaths {
        let work = self.paths.work.clone();
        let or_work = |p: &Option<PathBuf>, name: &str| p.clone().unwrap_or_else(|| work.join(name));
        ResolvedPaths {
            raw: self.paths.raw.clone(),
            mined: or_work(&self.paths.mined, "mined"),
            stats: work.join("stats"),
            sampled: or_work(&self.paths.sampled, "sampled"),
            preprocessed: or_work(&self.paths.preprocessed, "preprocessed"),
            bpe: work.join("bpe"),
            tagged: work.join("tagged"),
            report: work.join("run_report.json"),
            work,
        }
    }

    pub fn registry(&self) -> Result<LanguageRegistry, PipelineError> {
        match &self.languages.registry {
            None => Ok(LanguageRegistry::builtin().clone()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Config {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                LanguageRegistry::from_toml(&text).map_err(|e| PipelineError::Config {
                    path: path.clone(),
                    reason: e.to_string(),
                })
            }
        }
    }

    pub fn plan(&self) -> SamplingPlan {
        SamplingPlan::new(self.sampling.clone(), self.seed)
    }

    /// Checks everything that can be checked without reading corpora.
    pub fn validate(&self) -> Result<(LanguageRegistry, LanguageCode), PipelineError> {
        let invalid = |m: String| Err(PipelineError::Invalid(m));
        let registry = self.registry()?;
        let pivot = registry.pivot();
        if let Some(p) = &self.languages.pivot {
            if p != pivot.as_str() {
                return invalid(format!("pivot {p:?} differs from the registry pivot {pivot}"));
            }
        }
        if self.threads == 0 {
            return invalid("threads must be at least 1".into());
        }
        if !self.paths.raw.is_dir() {
            return invalid(format!("raw corpus directory {} does not exist", self.paths.raw.display()));
        }
        if let Some(dev) = &self.dev {
            if !dev.path.is_dir() {
                return invalid(format!("dev directory {} does not exist", dev.path.display()));
            }
            if !(dev.fraction > 0.0 && dev.fraction <= 1.0) {
                return invalid(format!("dev fraction {} is outside (0, 1]", dev.fraction));
            }
        }
        self.plan()
            .validate(pivot)
            .map_err(|e| PipelineError::Invalid(e.to_string()))?;
        if let SamplingStrategy::SamplePairs { pairs } = &self.sampling {
            for pair in pairs {
                for lang in [pair.first(), pair.second()] {
                    registry
                        .lookup(lang.as_str())
                        .map_err(|e| PipelineError::Invalid(e.to_string()))?;
                }
            }
        }
        Ok((registry, pivot))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 3
[paths]
raw = "raw"
work = "/abs/work"
[sampling]
strategy = "train-all"
"#;

    #[test]
    fn defaults_and_rebasing() {
        let c = PipelineConfig::from_toml(MINIMAL, Path::new("/cfg")).unwrap();
        assert_eq!(c.threads, 1);
        assert_eq!(c.extract.xprod_cap, 64);
        assert_eq!(c.bpe, BpeConfig::default());
        assert!(c.preprocess.to_devanagari);
        let p = c.paths();
        assert_eq!(p.raw, Path::new("/cfg/raw"));
        assert_eq!(p.mined, Path::new("/abs/work/mined"));
        assert_eq!(c.sampling, SamplingStrategy::TrainAll);
    }

    #[test]
    fn strategies_parse() {
        let text = MINIMAL.replace(
            "strategy = \"train-all\"",
            "strategy = \"sample-pairs\"\npairs = [\"bn-hi\", \"ta-te\"]",
        );
        let c = PipelineConfig::from_toml(&text, Path::new(".")).unwrap();
        assert!(matches!(c.sampling, SamplingStrategy::SamplePairs { ref pairs } if pairs.len() == 2));
        let text = MINIMAL.replace(
            "strategy = \"train-all\"",
            "strategy = \"sample-fraction\"\nper_pair_target = 10",
        );
        let c = PipelineConfig::from_toml(&text, Path::new(".")).unwrap();
        assert_eq!(c.sampling, SamplingStrategy::SampleFraction { per_pair_target: 10 });
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\n[bpe]\nmerges = 5\n");
        assert!(PipelineConfig::from_toml(&text, Path::new(".")).is_err());
    }

    #[test]
    fn missing_raw_dir_fails_validation() {
        let c = PipelineConfig::from_toml(MINIMAL, Path::new("/nonexistent-dir")).unwrap();
        assert!(matches!(c.validate(), Err(PipelineError::Invalid(_))));
    }
}
