use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_lengths, is_py_space, py_split, Metric, MetricError, MetricScore};
use crate::script::tokenize_13a;

pub const BLEU_NGRAM_ORDER: usize = 4;

// Floor for log(0), as in the reference scorer.
const LOG_ZERO: f64 = -9_999_999_999.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BleuTokenize {
    #[default]
    #[serde(rename = "13a")]
    Thirteen,
    #[serde(rename = "none")]
    None,
}

impl BleuTokenize {
    pub fn name(self) -> &'static str {
        match self {
            BleuTokenize::Thirteen => "13a",
            BleuTokenize::None => "none",
        }
    }

    pub fn signature(self) -> String {
        format!(
            "BLEU+case.mixed+numrefs.1+smooth.exp+tok.{}+version.1.5.1",
            self.name()
        )
    }
}

impl fmt::Display for BleuTokenize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BleuTokenize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "13a" => Ok(BleuTokenize::Thirteen),
            "none" => Ok(BleuTokenize::None),
            _ => Err(format!("unknown BLEU tokenization {s:?}: expected 13a or none")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BleuStats {
    pub correct: [u64; BLEU_NGRAM_ORDER],
    pub total: [u64; BLEU_NGRAM_ORDER],
    pub sys_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    fn add_sentence(&mut self, hyp: &[&str], reference: &[&str]) {
        self.sys_len += hyp.len() as u64;
        self.ref_len += reference.len() as u64;
        for n in 1..=BLEU_NGRAM_ORDER {
            let mut ref_counts: HashMap<&[&str], u64> = HashMap::new();
            for g in reference.windows(n) {
                *ref_counts.entry(g).or_insert(0) += 1;
            }
            let mut hyp_counts: HashMap<&[&str], u64> = HashMap::new();
            for g in hyp.windows(n) {
                *hyp_counts.entry(g).or_insert(0) += 1;
            }
            for (g, c) in hyp_counts {
                self.correct[n - 1] += c.min(ref_counts.get(g).copied().unwrap_or(0));
                self.total[n - 1] += c;
            }
        }
    }

    /// Corpus BLEU with exponential smoothing of zero-match orders.
    pub fn score(&self) -> f64 {
        // Precisions are kept as fractions so a perfect match is exactly 1.
        let mut log_sum = 0.0;
        let mut smooth = 1.0;
        let mut stopped = false;
        for n in 0..BLEU_NGRAM_ORDER {
            if stopped || self.total[n] == 0 {
                stopped = true;
                log_sum += LOG_ZERO;
                continue;
            }
            let frac = if self.correct[n] == 0 {
                smooth *= 2.0;
                1.0 / (smooth * self.total[n] as f64)
            } else {
                self.correct[n] as f64 / self.total[n] as f64
            };
            log_sum += frac.ln();
        }
        let bp = if self.sys_len < self.ref_len {
            if self.sys_len == 0 {
                0.0
            } else {
                (1.0 - self.ref_len as f64 / self.sys_len as f64).exp()
            }
        } else {
            1.0
        };
        100.0 * bp * (log_sum / BLEU_NGRAM_ORDER as f64).exp()
    }
}

fn tokens(line: &str, tok: BleuTokenize) -> String {
    let line = line.trim_end_matches(is_py_space);
    match tok {
        BleuTokenize::Thirteen => tokenize_13a(line),
        BleuTokenize::None => line.to_string(),
    }
}

pub fn bleu_stats<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    tok: BleuTokenize,
) -> Result<BleuStats, MetricError> {
    check_lengths(hyps, refs)?;
    let mut stats = BleuStats::default();
    for (i, (h, r)) in hyps.iter().zip(refs).enumerate() {
        if r.as_ref().is_empty() {
            return Err(MetricError::EmptyReference(i));
        }
        let h = tokens(h.as_ref(), tok);
        let r = tokens(r.as_ref(), tok);
        let h: Vec<&str> = py_split(&h).collect();
        let r: Vec<&str> = py_split(&r).collect();
        stats.add_sentence(&h, &r);
    }
    Ok(stats)
}

/// Case-sensitive corpus BLEU-4 against a single reference per line.
pub fn bleu<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    tok: BleuTokenize,
) -> Result<MetricScore, MetricError> {
    let stats = bleu_stats(hyps, refs, tok)?;
    Ok(MetricScore {
        metric: Metric::Bleu,
        value: stats.score(),
        signature: tok.signature(),
    })
}
