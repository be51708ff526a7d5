use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_lengths, is_py_space, Metric, MetricError, MetricScore};

pub const CHRF_ORDER: usize = 6;
pub const CHRF_BETA: f64 = 2.0;

const SIGNATURE: &str = "chrF2+numchars.6+space.false+version.1.5.1";

/// Per-order (hypothesis, reference, matched) character n-gram counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChrfStats {
    pub hyp: [u64; CHRF_ORDER],
    pub reference: [u64; CHRF_ORDER],
    pub matched: [u64; CHRF_ORDER],
}

fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], u64> {
    let mut counts = HashMap::new();
    for g in chars.windows(n) {
        *counts.entry(g).or_insert(0) += 1;
    }
    counts
}

impl ChrfStats {
    fn add_sentence(&mut self, hyp: &str, reference: &str) {
        let h: Vec<char> = hyp.chars().filter(|c| !is_py_space(*c)).collect();
        let r: Vec<char> = reference.chars().filter(|c| !is_py_space(*c)).collect();
        for n in 1..=CHRF_ORDER {
            let hg = char_ngrams(&h, n);
            let rg = char_ngrams(&r, n);
            self.hyp[n - 1] += hg.values().sum::<u64>();
            self.reference[n - 1] += rg.values().sum::<u64>();
            self.matched[n - 1] += hg
                .iter()
                .map(|(g, c)| (*c).min(rg.get(g).copied().unwrap_or(0)))
                .sum::<u64>();
        }
    }

    /// F-beta over precision and recall averaged across the orders that
    /// have n-grams on both sides. Returned on the 0..100 scale.
    pub fn score(&self) -> f64 {
        let mut precision = 0.0;
        let mut recall = 0.0;
        let mut effective = 0;
        for n in 0..CHRF_ORDER {
            if self.hyp[n] > 0 && self.reference[n] > 0 {
                precision += self.matched[n] as f64 / self.hyp[n] as f64;
                recall += self.matched[n] as f64 / self.reference[n] as f64;
                effective += 1;
            }
        }
        if effective == 0 {
            return 0.0;
        }
        precision /= effective as f64;
        recall /= effective as f64;
        if precision + recall == 0.0 {
            return 0.0;
        }
        let b2 = CHRF_BETA * CHRF_BETA;
        100.0 * (1.0 + b2) * precision * recall / (b2 * precision + recall)
    }
}

pub fn chrf_stats<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<ChrfStats, MetricError> {
    check_lengths(hyps, refs)?;
    let mut stats = ChrfStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        stats.add_sentence(h.as_ref(), r.as_ref());
    }
    Ok(stats)
}

/// Corpus chrF2: character 1..6-grams with whitespace removed.
pub fn chrf2<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
) -> Result<MetricScore, MetricError> {
    let stats = chrf_stats(hyps, refs)?;
    Ok(MetricScore {
        metric: Metric::Chrf2,
        value: stats.score(),
        signature: SIGNATURE.to_string(),
    })
}
