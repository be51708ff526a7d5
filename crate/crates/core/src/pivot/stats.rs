use std::collections::BTreeMap;
use std::fmt::Write;

use super::{MinedSet, MiningError};
use crate::corpus::{BitextCorpus, LanguageCode, LanguagePair, LanguageRegistry};

/// Pair-count matrix laid out like the dataset statistics table: one row per
/// non-pivot language, an English column with the English-centric corpus
/// size, and a symmetric non-English block with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsMatrix {
    pivot: LanguageCode,
    languages: Vec<LanguageCode>,
    english: Vec<u64>,
    counts: Vec<Vec<u64>>,
}

impl StatsMatrix {
    /// Builds from per-pair counts; missing pairs count as zero.
    pub fn from_pair_counts(
        pivot: LanguageCode,
        languages: &[LanguageCode],
        english: &[u64],
        pair_counts: impl IntoIterator<Item = (LanguagePair, u64)>,
    ) -> Result<Self, MiningError> {
        let n = languages.len();
        if english.len() != n {
            return Err(MiningError::InvalidMatrix(format!(
                "consistent: {} languages but {} English counts",
                n,
                english.len()
            )));
        }
        let position: BTreeMap<LanguageCode, usize> =
            languages.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        if position.len() != n || position.contains_key(&pivot) {
            return Err(MiningError::InvalidMatrix(
                "indexed by distinct non-pivot languages".into(),
            ));
        }
        let mut counts = vec![vec![0u64; n]; n];
        for (pair, count) in pair_counts {
            let (Some(&i), Some(&j)) = (position.get(&pair.first()), position.get(&pair.second()))
            else {
                return Err(MiningError::InvalidMatrix(format!(
                    "covering pair {pair}"
                )));
            };
            counts[i][j] = count;
            counts[j][i] = count;
        }
        Ok(StatsMatrix {
            pivot,
            languages: languages.to_vec(),
            english: english.to_vec(),
            counts,
        })
    }

    /// Builds from a full square block, checking symmetry and the zero diagonal.
    pub fn from_matrix(
        pivot: LanguageCode,
        languages: &[LanguageCode],
        english: &[u64],
        counts: Vec<Vec<u64>>,
    ) -> Result<Self, MiningError> {
        let n = languages.len();
        if counts.len() != n || counts.iter().any(|row| row.len() != n) {
            return Err(MiningError::InvalidMatrix(format!("{n}x{n}")));
        }
        for i in 0..n {
            if counts[i][i] != 0 {
                return Err(MiningError::InvalidMatrix("zero on the diagonal".into()));
            }
            for j in 0..i {
                if counts[i][j] != counts[j][i] {
                    return Err(MiningError::InvalidMatrix(format!(
                        "symmetric at ({}, {})",
                        languages[i], languages[j]
                    )));
                }
            }
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((LanguagePair::new(languages[i], languages[j])?, counts[i][j]));
            }
        }
        StatsMatrix::from_pair_counts(pivot, languages, english, pairs)
    }

    pub fn languages(&self) -> &[LanguageCode] {
        &self.languages
    }

    pub fn english_counts(&self) -> &[u64] {
        &self.english
    }

    pub fn count(&self, a: LanguageCode, b: LanguageCode) -> Option<u64> {
        let i = self.languages.iter().position(|l| *l == a)?;
        let j = self.languages.iter().position(|l| *l == b)?;
        Some(self.counts[i][j])
    }

    /// Column totals of the non-English block, in language order.
    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.languages.len())
            .map(|j| self.counts.iter().map(|row| row[j]).sum())
            .collect()
    }

    pub fn english_total(&self) -> u64 {
        self.english.iter().sum()
    }

    /// Sum over the whole non-English block (each pair counted twice).
    pub fn grand_total(&self) -> u64 {
        self.column_sums().iter().sum()
    }

    /// Sum over unordered pairs (upper triangle).
    pub fn unique_pairs(&self) -> u64 {
        let n = self.languages.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.counts[i][j])
            .sum()
    }

    /// Parses the layout written by [`StatsMatrix::to_tsv`]. `SUM` and
    /// `TOTAL` rows are ignored, so a bare matrix is accepted too.
    pub fn parse_tsv(text: &str, registry: &LanguageRegistry) -> Result<Self, MiningError> {
        let bad = MiningError::MalformedTable;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header row".into()))?;
        let mut cols = header.split('\t');
        if cols.next().map(str::trim) != Some("") {
            return Err(bad("header must start with an empty cell".into()));
        }
        let pivot = registry.lookup(cols.next().unwrap_or_default().trim())?;
        if pivot != registry.pivot() {
            return Err(bad(format!("first column must be the pivot {}", registry.pivot())));
        }
        let languages: Vec<LanguageCode> = cols
            .map(|c| registry.lookup(c.trim()))
            .collect::<Result<_, _>>()?;
        let mut english = Vec::with_capacity(languages.len());
        let mut counts = Vec::with_capacity(languages.len());
        for line in lines {
            let mut cells = line.split('\t');
            let label = cells.next().unwrap_or_default().trim();
            if label == "SUM" || label == "TOTAL" {
                continue;
            }
            let row_lang = registry.lookup(label)?;
            if languages.get(counts.len()) != Some(&row_lang) {
                return Err(bad(format!("row {row_lang} out of header order")));
            }
            let values: Vec<u64> = cells
                .map(|c| {
                    c.trim()
                        .replace(',', "")
                        .parse::<u64>()
                        .map_err(|_| bad(format!("non-integer cell {c:?} in row {row_lang}")))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != languages.len() + 1 {
                return Err(bad(format!(
                    "expected {} cells in row {row_lang}, got {}",
                    languages.len() + 1,
                    values.len()
                )));
            }
            english.push(values[0]);
            counts.push(values[1..].to_vec());
        }
        StatsMatrix::from_matrix(pivot, &languages, &english, counts)
    }

    /// Tab-separated rendering. Cells are divided by `divisor` and rounded to
    /// the nearest integer, so `1000` gives the table's "1000s of sentences".
    pub fn to_tsv(&self, divisor: u64) -> String {
        let divisor = divisor.max(1);
        let scale = |v: u64| (v + divisor / 2) / divisor;
        let mut out = String::new();
        out.push_str(self.pivot.as_str());
        for lang in &self.languages {
            write!(out, "\t{lang}").unwrap();
        }
        // Header starts with an empty row label.
        out.insert(0, '\t');
        out.push('\n');
        for (i, lang) in self.languages.iter().enumerate() {
            write!(out, "{lang}\t{}", scale(self.english[i])).unwrap();
            for count in &self.counts[i] {
                write!(out, "\t{}", scale(*count)).unwrap();
            }
            out.push('\n');
        }
        write!(out, "SUM\t{}", scale(self.english_total())).unwrap();
        for sum in self.column_sums() {
            write!(out, "\t{}", scale(sum)).unwrap();
        }
        out.push('\n');
        writeln!(out, "TOTAL\t\t{}", scale(self.grand_total())).unwrap();
        out
    }
}

/// Deduplicated and raw views of the same extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionStats {
    pub deduplicated: StatsMatrix,
    pub raw: StatsMatrix,
}

/// Rows cover every non-pivot language seen in either input, in code order.
pub fn extraction_stats(
    pivot: LanguageCode,
    english_corpora: &[BitextCorpus],
    mined: &MinedSet,
) -> Result<ExtractionStats, MiningError> {
    let mut english: BTreeMap<LanguageCode, u64> = BTreeMap::new();
    for corpus in english_corpora {
        let other = if corpus.src_lang() == pivot {
            corpus.tgt_lang()
        } else if corpus.tgt_lang() == pivot {
            corpus.src_lang()
        } else {
            return Err(MiningError::NonPivotCorpus(corpus.direction()));
        };
        *english.entry(other).or_default() += corpus.len() as u64;
    }
    for pair in mined.pairs() {
        for lang in [pair.first(), pair.second()] {
            if lang == pivot {
                return Err(MiningError::PivotLanguageRequested(lang));
            }
            english.entry(lang).or_default();
        }
    }
    let languages: Vec<LanguageCode> = english.keys().copied().collect();
    let english: Vec<u64> = english.values().copied().collect();
    let deduplicated = StatsMatrix::from_pair_counts(
        pivot,
        &languages,
        &english,
        mined.iter().map(|(p, m)| (*p, m.corpus.len() as u64)),
    )?;
    let raw = StatsMatrix::from_pair_counts(
        pivot,
        &languages,
        &english,
        mined.iter().map(|(p, m)| (*p, m.raw_pairs)),
    )?;
    Ok(ExtractionStats { deduplicated, raw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pivot::{build_pivot_index, mine_all, MiningConfig};

    fn lang(code: &str) -> LanguageCode {
        code.parse().unwrap()
    }

    #[test]
    fn empty_mined_set_keeps_english_column() {
        let english = [
            BitextCorpus::from_texts(lang("en"), lang("bn"), [("a", "b"), ("c", "d")]).unwrap(),
            BitextCorpus::from_texts(lang("hi"), lang("en"), [("x", "y")]).unwrap(),
        ];
        let stats = extraction_stats(lang("en"), &english, &MinedSet::new()).unwrap();
        let m = &stats.deduplicated;
        assert_eq!(m.english_counts(), [2, 1]);
        assert_eq!(m.column_sums(), [0, 0]);
        assert_eq!(m.grand_total(), 0);
        assert_eq!(m.english_total(), 3);
    }

    #[test]
    fn grand_total_is_twice_unique_pairs() {
        let english = [
            BitextCorpus::from_texts(lang("en"), lang("bn"), [("a", "B1"), ("b", "B2")]).unwrap(),
            BitextCorpus::from_texts(lang("en"), lang("hi"), [("a", "H1"), ("b", "H2")]).unwrap(),
            BitextCorpus::from_texts(lang("en"), lang("ta"), [("a", "T1")]).unwrap(),
        ];
        let index = build_pivot_index(&english, lang("en")).unwrap();
        let mined = mine_all(&index, &[lang("bn"), lang("hi"), lang("ta")], &MiningConfig::default())
            .unwrap();
        let stats = extraction_stats(lang("en"), &english, &mined).unwrap();
        let m = &stats.deduplicated;
        assert_eq!(m.count(lang("bn"), lang("hi")), Some(2));
        assert_eq!(m.count(lang("hi"), lang("bn")), Some(2));
        assert_eq!(m.count(lang("ta"), lang("ta")), Some(0));
        assert_eq!(m.unique_pairs(), 4);
        assert_eq!(m.grand_total(), 8);
        assert_eq!(stats.raw.unique_pairs(), 4);
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let langs = [lang("bn"), lang("hi")];
        let err =
            StatsMatrix::from_matrix(lang("en"), &langs, &[1, 1], vec![vec![0, 2], vec![3, 0]]);
        assert!(err.is_err());
        let err =
            StatsMatrix::from_matrix(lang("en"), &langs, &[1, 1], vec![vec![1, 2], vec![2, 0]]);
        assert!(err.is_err());
    }

    #[test]
    fn tsv_layout() {
        let langs = [lang("bn"), lang("hi")];
        let m = StatsMatrix::from_matrix(
            lang("en"),
            &langs,
            &[960_000, 2_553_000],
            vec![vec![0, 819_000], vec![819_000, 0]],
        )
        .unwrap();
        assert_eq!(
            m.to_tsv(1000),
            "\ten\tbn\thi\nbn\t960\t0\t819\nhi\t2553\t819\t0\nSUM\t3513\t819\t819\nTOTAL\t\t1638\n"
        );
    }
}
