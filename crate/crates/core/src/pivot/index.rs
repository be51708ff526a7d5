use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use super::{normalize_pivot, MiningError, PivotKey};
use crate::corpus::{BitextCorpus, LanguageCode, LanguagePair, SentencePair};

/// Default bound on the cross product emitted for a single pivot sentence.
pub const DEFAULT_XPROD_CAP: usize = 64;

type Translations = BTreeMap<LanguageCode, BTreeSet<String>>;

/// Normalized English sentence → per-language sets of distinct translations.
#[derive(Debug, Clone)]
pub struct PivotIndex {
    pivot: LanguageCode,
    entries: HashMap<PivotKey, Translations>,
}

impl PivotIndex {
    pub fn new(pivot: LanguageCode) -> Self {
        PivotIndex {
            pivot,
            entries: HashMap::new(),
        }
    }

    pub fn pivot(&self) -> LanguageCode {
        self.pivot
    }

    /// Number of distinct pivot keys.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds every pair of an English-centric corpus (either orientation).
    pub fn add_corpus(&mut self, corpus: &BitextCorpus) -> Result<(), MiningError> {
        let english_is_src = if corpus.src_lang() == self.pivot {
            true
        } else if corpus.tgt_lang() == self.pivot {
            false
        } else {
            return Err(MiningError::NonPivotCorpus(corpus.direction()));
        };
        let other = if english_is_src {
            corpus.tgt_lang()
        } else {
            corpus.src_lang()
        };
        for pair in corpus.iter() {
            let (english, text) = if english_is_src {
                (pair.src(), pair.tgt())
            } else {
                (pair.tgt(), pair.src())
            };
            self.entries
                .entry(normalize_pivot(english))
                .or_default()
                .entry(other)
                .or_default()
                .insert(text.to_string());
        }
        Ok(())
    }

    /// Distinct translations of `key` into `lang`.
    pub fn translations(&self, key: &PivotKey, lang: LanguageCode) -> Option<&BTreeSet<String>> {
        self.entries.get(key)?.get(&lang)
    }

    /// Languages present anywhere in the index, in code order.
    pub fn languages(&self) -> BTreeSet<LanguageCode> {
        self.entries
            .values()
            .flat_map(|t| t.keys().copied())
            .collect()
    }
}

pub fn build_pivot_index(
    corpora: &[BitextCorpus],
    pivot: LanguageCode,
) -> Result<PivotIndex, MiningError> {
    let mut index = PivotIndex::new(pivot);
    for corpus in corpora {
        index.add_corpus(corpus)?;
    }
    log::debug!(
        "stage=index corpora={} keys={}",
        corpora.len(),
        index.len()
    );
    Ok(index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiningConfig {
    /// Maximum pairs emitted per pivot key; `None` disables the cap.
    pub xprod_cap: Option<usize>,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            xprod_cap: Some(DEFAULT_XPROD_CAP),
        }
    }
}

/// A mined corpus together with the bookkeeping needed for statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinedCorpus {
    pub corpus: BitextCorpus,
    /// Sum of per-key cross-product sizes, before the cap, the identical-text
    /// filter and global deduplication.
    pub raw_pairs: u64,
    /// Pivot keys whose cross product exceeded the cap and was truncated.
    pub capped_keys: Vec<String>,
}

/// Mines `l1 → l2` with the default configuration.
pub fn mine_pairs(
    index: &PivotIndex,
    l1: LanguageCode,
    l2: LanguageCode,
) -> Result<BitextCorpus, MiningError> {
    Ok(mine_pairs_with(index, l1, l2, &MiningConfig::default())?.corpus)
}

/// Output is sorted by pivot key, then lexicographically by `(s_l1, s_l2)`;
/// the first occurrence of a pair wins and `s_l1 == s_l2` pairs are dropped.
pub fn mine_pairs_with(
    index: &PivotIndex,
    l1: LanguageCode,
    l2: LanguageCode,
    config: &MiningConfig,
) -> Result<MinedCorpus, MiningError> {
    for lang in [l1, l2] {
        if lang == index.pivot {
            return Err(MiningError::PivotLanguageRequested(lang));
        }
    }
    if l1 == l2 {
        return Err(MiningError::SameLanguage(l1));
    }

    let mut shared: Vec<(&PivotKey, &BTreeSet<String>, &BTreeSet<String>)> = index
        .entries
        .iter()
        .filter_map(|(key, t)| Some((key, t.get(&l1)?, t.get(&l2)?)))
        .collect();
    shared.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let mut seen: HashSet<(&str, &str)> = HashSet::new();
    let mut pairs = Vec::new();
    let mut raw_pairs = 0u64;
    let mut capped_keys = Vec::new();
    for (key, left, right) in shared {
        let product = left.len() * right.len();
        raw_pairs += product as u64;
        let limit = match config.xprod_cap {
            Some(cap) if product > cap => {
                capped_keys.push(key.as_str().to_string());
                cap
            }
            _ => product,
        };
        let cross = left
            .iter()
            .flat_map(|a| right.iter().map(move |b| (a.as_str(), b.as_str())))
            .take(limit);
        for (a, b) in cross {
            if a != b && seen.insert((a, b)) {
                pairs.push(SentencePair::new(a, b)?);
            }
        }
    }
    if !capped_keys.is_empty() {
        log::warn!(
            "stage=extract pair={l1}-{l2} capped_keys={} cap={:?}",
            capped_keys.len(),
            config.xprod_cap
        );
        for key in &capped_keys {
            log::debug!("stage=extract pair={l1}-{l2} capped_key={key:?}");
        }
    }
    Ok(MinedCorpus {
        corpus: BitextCorpus::new(l1, l2, pairs)?,
        raw_pairs,
        capped_keys,
    })
}

/// One mined corpus per unordered pair, oriented `first → second`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MinedSet {
    corpora: BTreeMap<LanguagePair, MinedCorpus>,
}

impl MinedSet {
    pub fn new() -> Self {
        MinedSet::default()
    }

    pub fn insert(&mut self, mined: MinedCorpus) -> Result<(), MiningError> {
        let corpus = &mined.corpus;
        let pair = LanguagePair::new(corpus.src_lang(), corpus.tgt_lang())?;
        let mined = if corpus.src_lang() == pair.first() {
            mined
        } else {
            MinedCorpus {
                corpus: corpus.swapped(),
                ..mined
            }
        };
        self.corpora.insert(pair, mined);
        Ok(())
    }

    pub fn get(&self, pair: &LanguagePair) -> Option<&MinedCorpus> {
        self.corpora.get(pair)
    }

    /// The corpus for `l1 → l2`, swapped from the stored orientation if needed.
    pub fn corpus(&self, l1: LanguageCode, l2: LanguageCode) -> Option<BitextCorpus> {
        let pair = LanguagePair::new(l1, l2).ok()?;
        let stored = &self.corpora.get(&pair)?.corpus;
        Some(if stored.src_lang() == l1 {
            stored.clone()
        } else {
            stored.swapped()
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LanguagePair, &MinedCorpus)> {
        self.corpora.iter()
    }

    pub fn pairs(&self) -> impl Iterator<Item = LanguagePair> + '_ {
        self.corpora.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.corpora.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corpora.is_empty()
    }

    /// Total deduplicated pairs over all unordered pairs.
    pub fn total_pairs(&self) -> u64 {
        self.corpora.values().map(|m| m.corpus.len() as u64).sum()
    }
}

/// Mines every unordered pair of `languages`. Pairs run in parallel; the
/// result does not depend on scheduling.
pub fn mine_all(
    index: &PivotIndex,
    languages: &[LanguageCode],
    config: &MiningConfig,
) -> Result<MinedSet, MiningError> {
    let languages: BTreeSet<LanguageCode> = languages.iter().copied().collect();
    if let Some(pivot) = languages.iter().find(|l| **l == index.pivot) {
        return Err(MiningError::PivotLanguageRequested(*pivot));
    }
    if languages.len() < 2 {
        return Err(MiningError::TooFewLanguages(languages.len()));
    }
    let languages: Vec<LanguageCode> = languages.into_iter().collect();
    let pairs: Vec<LanguagePair> = languages
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            languages[i + 1..]
                .iter()
                .map(move |b| LanguagePair::new(*a, *b).expect("distinct"))
        })
        .collect();
    let mined = pairs
        .par_iter()
        .map(|pair| mine_pairs_with(index, pair.first(), pair.second(), config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut set = MinedSet::new();
    for m in mined {
        set.insert(m)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang(code: &str) -> LanguageCode {
        code.parse().unwrap()
    }

    fn corpus(src: &str, tgt: &str, pairs: &[(&str, &str)]) -> BitextCorpus {
        BitextCorpus::from_texts(lang(src), lang(tgt), pairs.iter().copied()).unwrap()
    }

    fn texts(c: &BitextCorpus) -> Vec<(String, String)> {
        c.iter()
            .map(|p| (p.src().to_string(), p.tgt().to_string()))
            .collect()
    }

    fn key(text: &str) -> PivotKey {
        normalize_pivot(text)
    }

    #[test]
    fn single_pair_index() {
        let index = build_pivot_index(&[corpus("en", "bn", &[("hello", "B1")])], lang("en")).unwrap();
        assert_eq!(index.len(), 1);
        let set = index.translations(&key("hello"), lang("bn")).unwrap();
        assert_eq!(set.iter().collect::<Vec<_>>(), ["B1"]);
    }

    #[test]
    fn duplicate_translation_is_stored_once() {
        let index = build_pivot_index(
            &[corpus("en", "bn", &[("hello", "B1"), ("hello", "B1")])],
            lang("en"),
        )
        .unwrap();
        assert_eq!(index.translations(&key("hello"), lang("bn")).unwrap().len(), 1);
    }

    #[test]
    fn distinct_translations_grouped_under_key() {
        let index = build_pivot_index(
            &[corpus("en", "bn", &[("hello", "B1"), ("hello ", "B2")])],
            lang("en"),
        )
        .unwrap();
        assert_eq!(index.translations(&key("hello"), lang("bn")).unwrap().len(), 2);
    }

    #[test]
    fn accepts_pivot_on_either_side() {
        let index = build_pivot_index(&[corpus("bn", "en", &[("B1", "hello")])], lang("en")).unwrap();
        assert!(index.translations(&key("hello"), lang("bn")).is_some());
    }

    #[test]
    fn rejects_non_pivot_corpus() {
        let err = build_pivot_index(&[corpus("bn", "hi", &[("B1", "H1")])], lang("en")).unwrap_err();
        assert!(matches!(err, MiningError::NonPivotCorpus(_)));
    }

    #[test]
    fn mines_shared_pivots_only() {
        let index = build_pivot_index(
            &[
                corpus("en", "bn", &[("hello", "B1")]),
                corpus("en", "hi", &[("hello", "H1"), ("bye", "H2")]),
            ],
            lang("en"),
        )
        .unwrap();
        let mined = mine_pairs(&index, lang("bn"), lang("hi")).unwrap();
        assert_eq!(texts(&mined), [("B1".into(), "H1".into())]);
    }

    #[test]
    fn cross_product_per_key() {
        let index = build_pivot_index(
            &[
                corpus("en", "bn", &[("hello", "B2"), ("hello", "B1")]),
                corpus("en", "hi", &[("hello", "H1")]),
            ],
            lang("en"),
        )
        .unwrap();
        let mined = mine_pairs(&index, lang("bn"), lang("hi")).unwrap();
        assert_eq!(
            texts(&mined),
            [("B1".into(), "H1".into()), ("B2".into(), "H1".into())]
        );
    }

    #[test]
    fn no_shared_keys_gives_empty_corpus() {
        let index = build_pivot_index(
            &[
                corpus("en", "bn", &[("a", "B1")]),
                corpus("en", "hi", &[("b", "H1")]),
            ],
            lang("en"),
        )
        .unwrap();
        assert!(mine_pairs(&index, lang("bn"), lang("hi")).unwrap().is_empty());
    }

    #[test]
    fn identical_texts_and_global_duplicates_dropped() {
        let index = build_pivot_index(
            &[
                corpus("en", "hi", &[("a", "X"), ("b", "Y"), ("c", "Z")]),
                corpus("en", "mr", &[("a", "X"), ("b", "M"), ("c", "M")]),
            ],
            lang("en"),
        )
        .unwrap();
        let mined = mine_pairs_with(&index, lang("hi"), lang("mr"), &MiningConfig::default()).unwrap();
        assert_eq!(
            texts(&mined.corpus),
            [("Y".into(), "M".into()), ("Z".into(), "M".into())]
        );
        assert_eq!(mined.raw_pairs, 3);
    }

    #[test]
    fn cap_truncates_and_records_key() {
        let bn: Vec<(String, String)> = (0..10).map(|i| ("x".into(), format!("B{i}"))).collect();
        let hi: Vec<(String, String)> = (0..10).map(|i| ("x".into(), format!("H{i}"))).collect();
        let index = build_pivot_index(
            &[
                BitextCorpus::from_texts(lang("en"), lang("bn"), bn).unwrap(),
                BitextCorpus::from_texts(lang("en"), lang("hi"), hi).unwrap(),
            ],
            lang("en"),
        )
        .unwrap();
        let capped = mine_pairs_with(&index, lang("bn"), lang("hi"), &MiningConfig::default()).unwrap();
        assert_eq!(capped.corpus.len(), 64);
        assert_eq!(capped.raw_pairs, 100);
        assert_eq!(capped.capped_keys, ["x"]);
        let full =
            mine_pairs_with(&index, lang("bn"), lang("hi"), &MiningConfig { xprod_cap: None }).unwrap();
        assert_eq!(full.corpus.len(), 100);
        assert!(full.capped_keys.is_empty());
    }

    #[test]
    fn pivot_language_rejected() {
        let index = PivotIndex::new(lang("en"));
        assert!(matches!(
            mine_pairs(&index, lang("en"), lang("hi")),
            Err(MiningError::PivotLanguageRequested(_))
        ));
        assert!(matches!(
            mine_all(&index, &[lang("bn")], &MiningConfig::default()),
            Err(MiningError::TooFewLanguages(1))
        ));
    }

    #[test]
    fn mine_all_covers_unordered_pairs_and_swaps() {
        let index = build_pivot_index(
            &[
                corpus("en", "bn", &[("a", "B1"), ("b", "B2")]),
                corpus("en", "hi", &[("a", "H1"), ("b", "H2")]),
                corpus("en", "ta", &[("b", "T2")]),
            ],
            lang("en"),
        )
        .unwrap();
        let set = mine_all(&index, &[lang("ta"), lang("bn"), lang("hi")], &MiningConfig::default()).unwrap();
        assert_eq!(set.len(), 3);
        let forward = set.corpus(lang("bn"), lang("hi")).unwrap();
        let backward = set.corpus(lang("hi"), lang("bn")).unwrap();
        assert_eq!(forward.swapped(), backward);
        let direct: BTreeSet<_> = texts(&mine_pairs(&index, lang("hi"), lang("bn")).unwrap())
            .into_iter()
            .collect();
        assert_eq!(direct, texts(&backward).into_iter().collect());
    }
}
