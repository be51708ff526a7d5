use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::StageError;
use crate::bpe::BpeModel;
use crate::corpus::{
    load_bitext, write_bitext, BitextCorpus, LanguageCode, LanguagePair, LanguageRegistry,
};
use crate::pivot::{
    mine_all, mine_pairs_with, ExtractionStats, MinedCorpus, MinedSet, MiningConfig, PivotIndex,
};
use crate::script::{normalize_unicode, to_devanagari, tokenize, ScriptError};
use crate::tagger::tag_line;

/// Per-pair `pair<TAB>pairs<TAB>raw_pairs<TAB>capped_keys` written by
/// [`write_mined`].
pub const RAW_COUNTS_FILE: &str = "raw_counts.tsv";
/// Per-pair `pair<TAB>pivot key` for every key truncated by the cap.
pub const CAPPED_KEYS_FILE: &str = "capped_keys.tsv";

/// Loads every `<a>-<b>.<a>` / `<a>-<b>.<b>` file pair in `dir`, sorted by
/// name. Files that do not follow the pattern are ignored.
pub fn discover_bitext(dir: &Path, registry: &LanguageRegistry) -> Result<Vec<BitextCorpus>, StageError> {
    let mut stems: BTreeMap<String, (LanguageCode, LanguageCode, u8)> = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| StageError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| StageError::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some((stem, ext)) = name.rsplit_once('.') else { continue };
        let Some((a, b)) = stem.split_once('-') else { continue };
        if a.len() != 2 || b.len() != 2 || (ext != a && ext != b) || a == b {
            continue;
        }
        let la = registry.lookup(a)?;
        let lb = registry.lookup(b)?;
        let bit = if ext == a { 1 } else { 2 };
        stems.entry(stem.to_string()).or_insert((la, lb, 0)).2 |= bit;
    }
    let mut corpora = Vec::with_capacity(stems.len());
    for (stem, (a, b, sides)) in stems {
        if sides != 3 {
            return Err(StageError::layout(
                dir.join(&stem),
                "only one side of the bitext is present",
            ));
        }
        corpora.push(load_bitext(
            dir.join(format!("{stem}.{a}")),
            dir.join(format!("{stem}.{b}")),
            a,
            b,
        )?);
    }
    log::info!("stage=load dir={} corpora={}", dir.display(), corpora.len());
    Ok(corpora)
}

/// Mines the given pairs, or every pair of `languages` when `pairs` is `None`.
pub fn extract(
    index: &PivotIndex,
    languages: &[LanguageCode],
    pairs: Option<&[LanguagePair]>,
    config: &MiningConfig,
) -> Result<MinedSet, StageError> {
    let set = match pairs {
        None => mine_all(index, languages, config)?,
        Some(pairs) => {
            let mined = pairs
                .par_iter()
                .map(|p| mine_pairs_with(index, p.first(), p.second(), config))
                .collect::<Result<Vec<_>, _>>()?;
            let mut set = MinedSet::new();
            for m in mined {
                set.insert(m)?;
            }
            set
        }
    };
    for (pair, m) in set.iter() {
        log::info!(
            "stage=extract pair={pair} pairs={} raw={} capped_keys={}",
            m.corpus.len(),
            m.raw_pairs,
            m.capped_keys.len()
        );
    }
    Ok(set)
}

/// Writes each pair as `<a>-<b>.<a>` / `<a>-<b>.<b>` plus the raw-count and
/// capped-key side tables.
pub fn write_mined(mined: &MinedSet, dir: &Path) -> Result<(), StageError> {
    fs::create_dir_all(dir).map_err(|e| StageError::io(dir, e))?;
    let mut counts = String::from("pair\tpairs\traw_pairs\tcapped_keys\n");
    let mut capped = String::from("pair\tpivot_key\n");
    for (pair, m) in mined.iter() {
        let (a, b) = (pair.first(), pair.second());
        write_bitext(
            &m.corpus,
            dir.join(format!("{a}-{b}.{a}")),
            dir.join(format!("{a}-{b}.{b}")),
        )?;
        let _ = writeln!(
            counts,
            "{pair}\t{}\t{}\t{}",
            m.corpus.len(),
            m.raw_pairs,
            m.capped_keys.len()
        );
        for key in &m.capped_keys {
            let _ = writeln!(capped, "{pair}\t{key}");
        }
    }
    let p = dir.join(RAW_COUNTS_FILE);
    fs::write(&p, counts).map_err(|e| StageError::io(&p, e))?;
    let p = dir.join(CAPPED_KEYS_FILE);
    fs::write(&p, capped).map_err(|e| StageError::io(&p, e))
}

/// Reloads a directory written by [`write_mined`]. Without the raw-count
/// table, raw counts fall back to the deduplicated sizes.
pub fn load_mined(dir: &Path, registry: &LanguageRegistry) -> Result<MinedSet, StageError> {
    let mut raw: BTreeMap<String, u64> = BTreeMap::new();
    let mut capped: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let counts_path = dir.join(RAW_COUNTS_FILE);
    if counts_path.exists() {
        let text = fs::read_to_string(&counts_path).map_err(|e| StageError::io(&counts_path, e))?;
        for (i, line) in text.lines().enumerate().skip(1) {
            let cols: Vec<&str> = line.split('\t').collect();
            let value = cols.get(2).and_then(|v| v.parse().ok()).ok_or_else(|| {
                StageError::layout(&counts_path, format!("line {}: malformed row", i + 1))
            })?;
            raw.insert(cols[0].to_string(), value);
        }
    }
    let capped_path = dir.join(CAPPED_KEYS_FILE);
    if capped_path.exists() {
        let text = fs::read_to_string(&capped_path).map_err(|e| StageError::io(&capped_path, e))?;
        for line in text.lines().skip(1) {
            if let Some((pair, key)) = line.split_once('\t') {
                capped.entry(pair.to_string()).or_default().push(key.to_string());
            }
        }
    }
    let mut set = MinedSet::new();
    for corpus in discover_bitext(dir, registry)? {
        let pair = LanguagePair::new(corpus.src_lang(), corpus.tgt_lang())?.to_string();
        let raw_pairs = raw.get(&pair).copied().unwrap_or(corpus.len() as u64);
        set.insert(MinedCorpus {
            raw_pairs,
            capped_keys: capped.remove(&pair).unwrap_or_default(),
            corpus,
        })?;
    }
    Ok(set)
}

/// Writes `table.tsv` (deduplicated) and `table.raw.tsv` into `dir`.
pub fn write_stats(stats: &ExtractionStats, dir: &Path) -> Result<(), StageError> {
    fs::create_dir_all(dir).map_err(|e| StageError::io(dir, e))?;
    for (name, matrix) in [("table.tsv", &stats.deduplicated), ("table.raw.tsv", &stats.raw)] {
        let p = dir.join(name);
        fs::write(&p, matrix.to_tsv(1)).map_err(|e| StageError::io(&p, e))?;
    }
    Ok(())
}

/// Normalizes, optionally transliterates Indic text into Devanagari, and
/// tokenizes. Returns the space-joined tokens.
pub fn preprocess_line(line: &str, lang: LanguageCode, devanagari: bool) -> Result<String, ScriptError> {
    let mut text = normalize_unicode(line);
    if devanagari && lang.script().is_indic() {
        text = to_devanagari(&text, lang)?;
    }
    Ok(tokenize(&text, lang).join(" "))
}

fn read_text_lines(path: &Path) -> Result<Vec<String>, StageError> {
    let text = fs::read_to_string(path).map_err(|e| StageError::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn write_text_lines(path: &Path, lines: &[String]) -> Result<(), StageError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| StageError::io(parent, e))?;
    }
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(l);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| StageError::io(path, e))
}

pub fn preprocess_file(
    input: &Path,
    output: &Path,
    lang: LanguageCode,
    devanagari: bool,
) -> Result<usize, StageError> {
    let lines = read_text_lines(input)?;
    let processed = lines
        .par_iter()
        .map(|l| preprocess_line(l, lang, devanagari))
        .collect::<Result<Vec<_>, _>>()?;
    write_text_lines(output, &processed)?;
    Ok(processed.len())
}

/// Segments a file line by line; returns the number of subword tokens.
pub fn apply_bpe_file(model: &BpeModel, input: &Path, output: &Path) -> Result<usize, StageError> {
    let lines = read_text_lines(input)?;
    let segmented = model.apply_lines(&lines);
    let tokens = segmented.iter().map(|l| l.split(' ').filter(|t| !t.is_empty()).count()).sum();
    write_text_lines(output, &segmented)?;
    Ok(tokens)
}

/// Prefixes every line of `input` with the direction's tags.
pub fn tag_file(
    input: &Path,
    output: &Path,
    src: LanguageCode,
    tgt: LanguageCode,
) -> Result<usize, StageError> {
    let lines = read_text_lines(input)?;
    let tagged = lines
        .par_iter()
        .map(|l| tag_line(l, src, tgt))
        .collect::<Result<Vec<_>, _>>()?;
    write_text_lines(output, &tagged)?;
    Ok(tagged.len())
}
