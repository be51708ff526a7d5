#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use multibridge::corpus::{BitextCorpus, LanguageCode};
use multibridge::pipeline::PipelineConfig;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use unicode_normalization::UnicodeNormalization;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Loads the pipeline fixture config with its work dir redirected to `work`.
pub fn pipeline_config(work: &Path) -> PipelineConfig {
    let path = fixtures().join("pipeline/config.toml");
    let mut config = PipelineConfig::load(&path).expect("fixture config");
    config.paths.work = work.to_path_buf();
    config
}

/// All regular files below `root`, keyed by their `/`-joined relative path.
pub fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap();
                let key = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
                out.insert(key, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

/// Lists differences between two trees; empty when they are byte-identical.
pub fn tree_diff(expected: &BTreeMap<String, Vec<u8>>, actual: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let mut diffs = Vec::new();
    for (name, bytes) in expected {
        match actual.get(name) {
            None => diffs.push(format!("missing {name}")),
            Some(got) if got != bytes => {
                let exp = String::from_utf8_lossy(bytes);
                let got = String::from_utf8_lossy(got);
                let line = exp
                    .lines()
                    .zip(got.lines())
                    .enumerate()
                    .find(|(_, (a, b))| a != b)
                    .map(|(i, (a, b))| format!("line {}: expected {a:?}, got {b:?}", i + 1))
                    .unwrap_or_else(|| format!("{} vs {} lines", exp.lines().count(), got.lines().count()));
                diffs.push(format!("differs {name}: {line}"));
            }
            _ => {}
        }
    }
    for name in actual.keys() {
        if !expected.contains_key(name) {
            diffs.push(format!("unexpected {name}"));
        }
    }
    diffs
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn code(s: &str) -> LanguageCode {
    s.parse().unwrap()
}

pub const INDIC: [&str; 10] = ["bn", "gu", "hi", "kn", "ml", "mr", "or", "pa", "ta", "te"];

/// English-centric corpora over `n_langs` languages whose English sides are
/// drawn from a pool of `pool` sentences, so a smaller pool means more
/// pivot overlap. Whitespace and composition vary between copies of the
/// same English sentence.
pub fn random_corpora(rng: &mut StdRng, n_langs: usize, total: usize, pool: usize) -> Vec<BitextCorpus> {
    let langs = &INDIC[..n_langs];
    let per_lang = (total / n_langs).max(1);
    let vocab = ["ka", "kha", "ga", "cha", "ta", "da", "na", "pa", "ma", "ra"];
    langs
        .iter()
        .map(|l| {
            let pairs: Vec<(String, String)> = (0..rng.random_range(1..=per_lang))
                .map(|_| {
                    let id = rng.random_range(0..pool);
                    let english = match rng.random_range(0..4) {
                        0 => format!("  sentence  {id}"),
                        1 => format!("caf\u{65}\u{301} {id}"),
                        2 => format!("caf\u{e9} {id}"),
                        _ => format!("sentence {id}"),
                    };
                    // A small translation space yields duplicates and
                    // texts shared across languages.
                    let n = rng.random_range(1..3);
                    let text: Vec<&str> = (0..n).map(|_| vocab[rng.random_range(0..vocab.len())]).collect();
                    (english, text.join(" "))
                })
                .collect();
            if rng.random_bool(0.5) {
                BitextCorpus::from_texts(code("en"), code(l), pairs).unwrap()
            } else {
                let swapped: Vec<_> = pairs.into_iter().map(|(e, x)| (x, e)).collect();
                BitextCorpus::from_texts(code(l), code("en"), swapped).unwrap()
            }
        })
        .collect()
}

fn oracle_key(s: &str) -> String {
    let nfc: String = s.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// English-side keys and the other side's text for one English-centric corpus.
fn english_rows(corpus: &BitextCorpus) -> Vec<(String, String)> {
    let english_src = corpus.src_lang().as_str() == "en";
    corpus
        .iter()
        .map(|p| {
            if english_src {
                (oracle_key(p.src()), p.tgt().to_string())
            } else {
                (oracle_key(p.tgt()), p.src().to_string())
            }
        })
        .collect()
}

/// Nested-loop join of the corpora for `l1` and `l2` on their English side.
/// Output is ordered by key, then lexicographically, with at most `cap`
/// candidates per key, identical texts dropped and the first copy of a pair kept.
pub fn brute_force_join(corpora: &[BitextCorpus], l1: LanguageCode, l2: LanguageCode, cap: Option<usize>) -> Vec<(String, String)> {
    let find = |l: LanguageCode| {
        corpora
            .iter()
            .filter(|c| c.src_lang() == l || c.tgt_lang() == l)
            .flat_map(english_rows)
            .collect::<Vec<_>>()
    };
    let (left, right) = (find(l1), find(l2));
    let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
    for (k, _) in left.iter().chain(&right) {
        let next = ids.len() as u32;
        ids.entry(k.as_str()).or_insert(next);
    }
    let lid: Vec<u32> = left.iter().map(|(k, _)| ids[k.as_str()]).collect();
    let rid: Vec<u32> = right.iter().map(|(k, _)| ids[k.as_str()]).collect();

    let mut matches: BTreeMap<&str, (BTreeSet<&str>, BTreeSet<&str>)> = BTreeMap::new();
    for (i, (k, a)) in left.iter().enumerate() {
        for (j, (_, b)) in right.iter().enumerate() {
            if lid[i] == rid[j] {
                let e = matches.entry(k.as_str()).or_default();
                e.0.insert(a);
                e.1.insert(b);
            }
        }
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (_, (a_set, b_set)) in matches {
        let product: Vec<(&str, &str)> = a_set.iter().flat_map(|a| b_set.iter().map(move |b| (*a, *b))).collect();
        let keep = cap.map_or(product.len(), |c| c.min(product.len()));
        for (a, b) in &product[..keep] {
            if a != b && seen.insert((*a, *b)) {
                out.push((a.to_string(), b.to_string()));
            }
        }
    }
    out
}

/// Reference BPE learner: recount every adjacent pair from scratch each
/// round and merge the most frequent, smallest `(left, right)` on ties.
pub fn brute_force_bpe(lines: &[String], num_merges: usize, floor: u64) -> Vec<(String, String)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for line in lines {
        for tok in line.split_whitespace() {
            *counts.entry(tok.to_string()).or_default() += 1;
        }
    }
    let mut words: Vec<(Vec<String>, u64)> = counts
        .into_iter()
        .map(|(w, f)| {
            let mut syms: Vec<String> = w.chars().map(String::from).collect();
            let last = syms.pop().unwrap();
            syms.push(last + "</w>");
            (syms, f)
        })
        .collect();
    let mut merges = Vec::new();
    while merges.len() < num_merges {
        let mut stats: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (w, f) in &words {
            for p in w.windows(2) {
                *stats.entry((p[0].clone(), p[1].clone())).or_default() += f;
            }
        }
        let Some((best, count)) = stats
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(p, c)| (p.clone(), *c))
        else {
            break;
        };
        if count < floor.max(1) {
            break;
        }
        for (w, _) in &mut words {
            let mut out = Vec::with_capacity(w.len());
            let mut i = 0;
            while i < w.len() {
                if i + 1 < w.len() && w[i] == best.0 && w[i + 1] == best.1 {
                    out.push(format!("{}{}", w[i], w[i + 1]));
                    i += 2;
                } else {
                    out.push(w[i].clone());
                    i += 1;
                }
            }
            *w = out;
        }
        merges.push(best);
    }
    merges
}

/// Random whitespace-tokenized toy corpus with at most `max_tokens` tokens.
pub fn random_toy_corpus(rng: &mut StdRng, max_tokens: usize) -> Vec<String> {
    let alphabet: Vec<char> = "abcdeलमनक".chars().collect();
    let stems: Vec<String> = (0..rng.random_range(3..40))
        .map(|_| (0..rng.random_range(1..8)).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect())
        .collect();
    let n_tokens = rng.random_range(1..=max_tokens);
    let mut lines = Vec::new();
    let mut left = n_tokens;
    while left > 0 {
        let len = rng.random_range(1..=left.min(20));
        lines.push((0..len).map(|_| stems[rng.random_range(0..stems.len())].as_str()).collect::<Vec<_>>().join(" "));
        left -= len;
    }
    lines
}
