use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bitext::read_lines;
use super::{CorpusError, LanguageCode, TranslationDirection};

/// One training direction. `path` is a file prefix relative to the manifest's
/// directory; the two sides live at `<path>.<src>` and `<path>.<tgt>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub src: LanguageCode,
    pub tgt: LanguageCode,
    pub path: String,
    pub count: u64,
    pub strategy: String,
}

impl ManifestEntry {
    pub fn direction(&self) -> TranslationDirection {
        TranslationDirection {
            src: self.src,
            tgt: self.tgt,
        }
    }

    pub fn side_path(&self, root: &Path, lang: LanguageCode) -> PathBuf {
        root.join(format!("{}.{}", self.path, lang))
    }
}

/// Which corpora, and how much of each, make up a training or validation set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub entries: Vec<ManifestEntry>,
    pub seed: u64,
}

impl TrainingManifest {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let mut seen = BTreeSet::new();
        for entry in &self.entries {
            let direction = TranslationDirection::new(entry.src, entry.tgt)?;
            if !seen.insert(direction) {
                return Err(CorpusError::DuplicateDirection(direction));
            }
        }
        Ok(())
    }

    pub fn total_pairs(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Checks every entry's count against the line counts of its two files.
    pub fn verify_counts(&self, root: &Path) -> Result<(), CorpusError> {
        for entry in &self.entries {
            for lang in [entry.src, entry.tgt] {
                let path = entry.side_path(root, lang);
                let actual = read_lines(&path)?.len() as u64;
                if actual != entry.count {
                    return Err(CorpusError::CountMismatch {
                        path,
                        expected: entry.count,
                        actual,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, CorpusError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, CorpusError> {
        let manifest: TrainingManifest = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let path = path.as_ref();
        self.validate()?;
        std::fs::write(path, self.to_json()?).map_err(|e| CorpusError::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))?;
        TrainingManifest::from_json(&text)
    }
}
