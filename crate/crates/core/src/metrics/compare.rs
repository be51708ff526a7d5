use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Metric, MetricError, MetricScore};
use crate::corpus::{LanguageCode, TranslationDirection};

/// Scores for one direction of an n-way test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub direction: TranslationDirection,
    pub scores: BTreeMap<Metric, MetricScore>,
    pub n_sentences: usize,
    /// Cosine between source and target reference embeddings, averaged per
    /// sentence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub testset_similarity: Option<MetricScore>,
}

impl EvalReport {
    pub fn new(direction: TranslationDirection, n_sentences: usize) -> Self {
        EvalReport {
            direction,
            scores: BTreeMap::new(),
            n_sentences,
            testset_similarity: None,
        }
    }

    pub fn with_score(mut self, score: MetricScore) -> Self {
        self.scores.insert(score.metric, score);
        self
    }

    fn column(&self, col: Column) -> Option<f64> {
        match col {
            Column::Labse => self.scores.get(&Metric::Cosine).map(|s| s.value),
            Column::Chrf2 => self.scores.get(&Metric::Chrf2).map(|s| s.value),
            Column::Bleu => self.scores.get(&Metric::Bleu).map(|s| s.value),
            Column::TsetSim => self.testset_similarity.as_ref().map(|s| s.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Labse,
    Chrf2,
    Bleu,
    TsetSim,
}

const COLUMNS: [Column; 4] = [Column::Labse, Column::Chrf2, Column::Bleu, Column::TsetSim];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub labse: Option<f64>,
    pub chrf2: Option<f64>,
    pub bleu: Option<f64>,
    pub tset_sim: Option<f64>,
    pub n_directions: usize,
    pub n_sentences: usize,
}

impl ComparisonRow {
    fn get(&self, col: Column) -> Option<f64> {
        match col {
            Column::Labse => self.labse,
            Column::Chrf2 => self.chrf2,
            Column::Bleu => self.bleu,
            Column::TsetSim => self.tset_sim,
        }
    }

    fn set(&mut self, col: Column, v: Option<f64>) {
        match col {
            Column::Labse => self.labse = v,
            Column::Chrf2 => self.chrf2 = v,
            Column::Bleu => self.bleu = v,
            Column::TsetSim => self.tset_sim = v,
        }
    }

    fn empty(label: impl Into<String>) -> Self {
        ComparisonRow {
            label: label.into(),
            labse: None,
            chrf2: None,
            bleu: None,
            tset_sim: None,
            n_directions: 0,
            n_sentences: 0,
        }
    }

    /// Unweighted mean of each column over the reports that have it.
    fn macro_over(label: impl Into<String>, reports: &[&EvalReport]) -> Self {
        let mut row = Self::empty(label);
        row.n_directions = reports.len();
        row.n_sentences = reports.iter().map(|r| r.n_sentences).sum();
        for col in COLUMNS {
            let vals: Vec<f64> = reports.iter().filter_map(|r| r.column(col)).collect();
            row.set(col, mean(&vals));
        }
        row
    }

    /// Sentence-weighted mean of each column.
    fn micro_over(label: impl Into<String>, reports: &[&EvalReport]) -> Self {
        let mut row = Self::empty(label);
        row.n_directions = reports.len();
        row.n_sentences = reports.iter().map(|r| r.n_sentences).sum();
        for col in COLUMNS {
            let (mut num, mut den) = (0.0, 0usize);
            for r in reports {
                if let Some(v) = r.column(col) {
                    num += v * r.n_sentences as f64;
                    den += r.n_sentences;
                }
            }
            row.set(col, (den > 0).then(|| num / den as f64));
        }
        row
    }
}

fn mean(vals: &[f64]) -> Option<f64> {
    (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub pivot: LanguageCode,
    /// One row per non-pivot source language: macro average over its
    /// directions into other non-pivot languages.
    pub rows: Vec<ComparisonRow>,
    /// Mean of `rows`.
    pub avg: ComparisonRow,
    /// Sentence-weighted mean over all non-pivot directions.
    pub micro: ComparisonRow,
    /// Macro average over directions out of the pivot.
    pub pivot_row: Option<ComparisonRow>,
    pub missing: Vec<TranslationDirection>,
}

impl ComparisonTable {
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("src\tlabse\tchrF2\tbleu\ttset_sim\tn_directions\tn_sentences\n");
        let mut write_row = |row: &ComparisonRow| {
            s.push_str(&row.label);
            for col in COLUMNS {
                match row.get(col) {
                    Some(v) => {
                        let _ = write!(s, "\t{v:.1}");
                    }
                    None => s.push_str("\t-"),
                }
            }
            let _ = writeln!(s, "\t{}\t{}", row.n_directions, row.n_sentences);
        };
        for row in &self.rows {
            write_row(row);
        }
        write_row(&self.avg);
        write_row(&self.micro);
        if let Some(row) = &self.pivot_row {
            write_row(row);
        }
        s
    }
}

/// Builds the English-centric vs non-English comparison. Directions into
/// the pivot are ignored; directions absent from `reports` are listed in
/// `missing`.
pub fn nway_compare(
    reports: &[EvalReport],
    pivot: LanguageCode,
) -> Result<ComparisonTable, MetricError> {
    let mut by_dir: BTreeMap<TranslationDirection, &EvalReport> = BTreeMap::new();
    for r in reports {
        if by_dir.insert(r.direction, r).is_some() {
            return Err(MetricError::DuplicateReport(r.direction));
        }
    }
    let langs: BTreeSet<LanguageCode> = reports
        .iter()
        .flat_map(|r| [r.direction.src, r.direction.tgt])
        .filter(|l| *l != pivot)
        .collect();

    let mut rows = Vec::new();
    let mut non_pivot = Vec::new();
    let mut missing = Vec::new();
    for &src in &langs {
        let mut outgoing = Vec::new();
        for &tgt in langs.iter().filter(|t| **t != src) {
            let dir = TranslationDirection::new(src, tgt).expect("distinct");
            match by_dir.get(&dir) {
                Some(r) => outgoing.push(*r),
                None => missing.push(dir),
            }
        }
        if !outgoing.is_empty() {
            rows.push(ComparisonRow::macro_over(src.to_string(), &outgoing));
        }
        non_pivot.extend(outgoing);
    }

    let from_pivot: Vec<&EvalReport> = by_dir
        .values()
        .filter(|r| r.direction.src == pivot)
        .copied()
        .collect();
    let has_pivot_source = !from_pivot.is_empty();
    if has_pivot_source {
        for &tgt in &langs {
            let dir = TranslationDirection::new(pivot, tgt).expect("distinct");
            if !by_dir.contains_key(&dir) {
                missing.push(dir);
            }
        }
    }
    missing.sort();

    let mut avg = ComparisonRow::empty("AVG");
    avg.n_directions = rows.iter().map(|r| r.n_directions).sum();
    avg.n_sentences = rows.iter().map(|r| r.n_sentences).sum();
    for col in COLUMNS {
        let vals: Vec<f64> = rows.iter().filter_map(|r| r.get(col)).collect();
        avg.set(col, mean(&vals));
    }

    Ok(ComparisonTable {
        pivot,
        micro: ComparisonRow::micro_over("MICRO", &non_pivot),
        avg,
        rows,
        pivot_row: has_pivot_source
            .then(|| ComparisonRow::macro_over(pivot.to_string(), &from_pivot)),
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> TranslationDirection {
        s.parse().unwrap()
    }

    fn bleu(v: f64) -> MetricScore {
        MetricScore {
            metric: Metric::Bleu,
            value: v,
            signature: String::new(),
        }
    }

    #[test]
    fn single_direction() {
        let r = EvalReport::new(d("bn-hi"), 10).with_score(bleu(12.5));
        let t = nway_compare(&[r], "en".parse().unwrap()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].bleu, Some(12.5));
        assert_eq!(t.avg.bleu, Some(12.5));
        assert_eq!(t.micro.bleu, Some(12.5));
        assert_eq!(t.missing, vec![d("hi-bn")]);
        assert!(t.pivot_row.is_none());
    }

    #[test]
    fn micro_is_sentence_weighted() {
        let reports = [
            EvalReport::new(d("bn-hi"), 100).with_score(bleu(10.0)),
            EvalReport::new(d("hi-bn"), 300).with_score(bleu(20.0)),
            EvalReport::new(d("en-hi"), 50).with_score(bleu(30.0)),
        ];
        let t = nway_compare(&reports, "en".parse().unwrap()).unwrap();
        assert_eq!(t.micro.bleu, Some((100.0 * 10.0 + 300.0 * 20.0) / 400.0));
        assert_eq!(t.avg.bleu, Some(15.0));
        assert_eq!(t.pivot_row.as_ref().unwrap().bleu, Some(30.0));
        assert_eq!(t.missing, vec![d("en-bn")]);
    }

    #[test]
    fn duplicate_report_rejected() {
        let r = EvalReport::new(d("bn-hi"), 1);
        assert!(nway_compare(&[r.clone(), r], "en".parse().unwrap()).is_err());
    }
}
