use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::Arc;

use super::model::{BpeModel, END_OF_WORD};
use super::{BpeConfig, BpeError};
use crate::tagger::is_tag;

/// Counts whitespace-separated tokens. Tag tokens are skipped.
pub fn word_counts<I, S>(lines: I) -> HashMap<String, u64>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = HashMap::new();
    for line in lines {
        for tok in line.as_ref().split_whitespace() {
            if !is_tag(tok) {
                *counts.entry(tok.to_string()).or_insert(0) += 1;
            }
        }
    }
    counts
}

type Pair = (u32, u32);

#[derive(Eq, PartialEq)]
struct Candidate {
    count: u64,
    left: Arc<str>,
    right: Arc<str>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| (&other.left, &other.right).cmp(&(&self.left, &self.right)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Learner {
    symbols: Vec<Arc<str>>,
    ids: HashMap<Arc<str>, u32>,
    words: Vec<(Vec<u32>, u64)>,
    counts: HashMap<Pair, u64>,
    occurs: HashMap<Pair, HashSet<usize>>,
    heap: BinaryHeap<Candidate>,
}

impl Learner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.ids.get(s) {
            return id;
        }
        let id = self.symbols.len() as u32;
        let s: Arc<str> = Arc::from(s);
        self.symbols.push(s.clone());
        self.ids.insert(s, id);
        id
    }

    fn push(&mut self, pair: Pair) {
        let count = self.counts.get(&pair).copied().unwrap_or(0);
        if count > 0 {
            self.heap.push(Candidate {
                count,
                left: self.symbols[pair.0 as usize].clone(),
                right: self.symbols[pair.1 as usize].clone(),
                pair,
            });
        }
    }

    fn best(&mut self) -> Option<(Pair, u64)> {
        while let Some(top) = self.heap.pop() {
            if self.counts.get(&top.pair).copied() == Some(top.count) {
                return Some((top.pair, top.count));
            }
        }
        None
    }

    fn merge(&mut self, pair: Pair) {
        let (a, b) = pair;
        let joined = format!("{}{}", self.symbols[a as usize], self.symbols[b as usize]);
        let new_id = self.intern(&joined);
        let mut indices: Vec<usize> = self
            .occurs
            .get(&pair)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        indices.sort_unstable();
        let mut touched: HashSet<Pair> = HashSet::new();
        for idx in indices {
            let (word, freq) = &self.words[idx];
            let freq = *freq;
            if !word.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            let mut merged = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == a && word[i + 1] == b {
                    merged.push(new_id);
                    i += 2;
                } else {
                    merged.push(word[i]);
                    i += 1;
                }
            }
            for w in word.windows(2) {
                let p = (w[0], w[1]);
                let c = self.counts.get_mut(&p).expect("pair counted");
                *c -= freq;
                touched.insert(p);
            }
            for w in merged.windows(2) {
                let p = (w[0], w[1]);
                *self.counts.entry(p).or_insert(0) += freq;
                self.occurs.entry(p).or_default().insert(idx);
                touched.insert(p);
            }
            self.words[idx].0 = merged;
        }
        let mut touched: Vec<Pair> = touched.into_iter().collect();
        touched.sort_unstable();
        for p in touched {
            if self.counts.get(&p) == Some(&0) {
                self.counts.remove(&p);
                self.occurs.remove(&p);
            } else {
                self.push(p);
            }
        }
    }
}

/// Learns merges greedily by pair frequency. Ties go to the
/// lexicographically smallest `(left, right)`.
pub fn learn_bpe<I, S>(lines: I, config: &BpeConfig) -> Result<BpeModel, BpeError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let counts = word_counts(lines);
    if counts.is_empty() {
        return Err(BpeError::EmptyCorpus);
    }
    let mut vocab: Vec<(String, u64)> = counts.into_iter().collect();
    vocab.sort();

    let mut learner = Learner {
        symbols: Vec::new(),
        ids: HashMap::new(),
        words: Vec::with_capacity(vocab.len()),
        counts: HashMap::new(),
        occurs: HashMap::new(),
        heap: BinaryHeap::new(),
    };
    for (word, freq) in &vocab {
        let chars: Vec<char> = word.chars().collect();
        let mut syms = Vec::with_capacity(chars.len());
        for (i, c) in chars.iter().enumerate() {
            let s = if i + 1 == chars.len() {
                format!("{c}{END_OF_WORD}")
            } else {
                c.to_string()
            };
            syms.push(learner.intern(&s));
        }
        learner.words.push((syms, *freq));
    }
    for (idx, (word, freq)) in learner.words.iter().enumerate() {
        for w in word.windows(2) {
            *learner.counts.entry((w[0], w[1])).or_insert(0) += freq;
            learner.occurs.entry((w[0], w[1])).or_default().insert(idx);
        }
    }
    let mut initial: Vec<Pair> = learner.counts.keys().copied().collect();
    initial.sort_unstable();
    for p in initial {
        learner.push(p);
    }

    let mut merges = Vec::new();
    while merges.len() < config.num_merges {
        let Some((pair, count)) = learner.best() else {
            break;
        };
        if count < config.merge_floor.max(1) {
            break;
        }
        merges.push((
            learner.symbols[pair.0 as usize].to_string(),
            learner.symbols[pair.1 as usize].to_string(),
        ));
        learner.merge(pair);
    }
    log::debug!("learned {} merges over {} word types", merges.len(), vocab.len());

    let mut model = BpeModel::from_merges(merges, config.num_merges, config.min_frequency);
    model.build_vocab(vocab.iter().map(|(w, c)| (w.as_str(), *c)));
    Ok(model)
}
