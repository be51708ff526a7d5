//! Python bindings: script normalization, tagging, BPE, pivot mining,
//! sampling, metrics and full pipeline runs.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use multibridge::bpe::{self, BpeConfig};
use multibridge::corpus::{BitextCorpus, LanguageCode, LanguageRegistry};
use multibridge::metrics::{self, BleuTokenize, EmbeddingTable};
use multibridge::pipeline::{self, PipelineConfig};
use multibridge::pivot::{self, MiningConfig, StatsMatrix};
use multibridge::sampler::{self, SeededRng};
use multibridge::script;
use multibridge::tagger;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn lang(code: &str) -> PyResult<LanguageCode> {
    code.parse().map_err(value_err)
}

#[pyfunction]
fn normalize(text: &str) -> String {
    script::normalize_unicode(text)
}

#[pyfunction]
fn to_devanagari(text: &str, lang_code: &str) -> PyResult<String> {
    script::to_devanagari(text, lang(lang_code)?).map_err(value_err)
}

#[pyfunction]
fn from_devanagari(text: &str, lang_code: &str) -> PyResult<String> {
    script::from_devanagari(text, lang(lang_code)?).map_err(value_err)
}

#[pyfunction]
fn tokenize(text: &str, lang_code: &str) -> PyResult<Vec<String>> {
    Ok(script::tokenize(text, lang(lang_code)?))
}

#[pyfunction]
fn detokenize(tokens: Vec<String>, lang_code: &str) -> PyResult<String> {
    Ok(script::detokenize(&tokens, lang(lang_code)?))
}

/// Full preprocessing of one line: normalize, map into Devanagari, tokenize.
#[pyfunction]
#[pyo3(signature = (line, lang_code, devanagari = true))]
fn preprocess(line: &str, lang_code: &str, devanagari: bool) -> PyResult<String> {
    pipeline::preprocess_line(line, lang(lang_code)?, devanagari).map_err(value_err)
}

#[pyfunction]
fn tag(line: &str, src: &str, tgt: &str) -> PyResult<String> {
    tagger::tag_line(line, lang(src)?, lang(tgt)?).map_err(value_err)
}

/// Returns `(src, tgt, payload)`.
#[pyfunction]
fn untag(line: &str) -> PyResult<(String, String, String)> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let seq = tagger::untag(&tokens).map_err(value_err)?;
    Ok((
        seq.direction.src.to_string(),
        seq.direction.tgt.to_string(),
        seq.payload.join(" "),
    ))
}

#[pyclass(name = "BpeModel", frozen)]
struct PyBpeModel {
    inner: bpe::BpeModel,
}

#[pymethods]
impl PyBpeModel {
    #[staticmethod]
    #[pyo3(signature = (lines, num_merges = 32000, min_frequency = 5, merge_floor = 2))]
    fn learn(lines: Vec<String>, num_merges: usize, min_frequency: u64, merge_floor: u64) -> PyResult<Self> {
        let config = BpeConfig { num_merges, min_frequency, merge_floor };
        let inner = bpe::learn_bpe(&lines, &config).map_err(value_err)?;
        Ok(PyBpeModel { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = bpe::BpeModel::load(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(PyBpeModel { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn merges(&self) -> Vec<(String, String)> {
        self.inner.merges().to_vec()
    }

    fn vocab(&self) -> Option<BTreeMap<String, u64>> {
        self.inner.vocab().cloned()
    }

    fn apply(&self, line: &str) -> String {
        self.inner.apply_line(line)
    }

    fn apply_lines(&self, lines: Vec<String>) -> Vec<String> {
        self.inner.apply_lines(&lines)
    }

    fn __len__(&self) -> usize {
        self.inner.merges().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "BpeModel(merges={}, min_frequency={})",
            self.inner.merges().len(),
            self.inner.min_frequency()
        )
    }
}

#[pyfunction]
fn revert_bpe(line: &str) -> PyResult<String> {
    bpe::revert_line(line).map_err(value_err)
}

type PyCorpus = (String, String, Vec<(String, String)>);

/// Mines every pair of non-pivot languages from English-centric corpora,
/// given as `(src_lang, tgt_lang, [(src, tgt), ...])`. Returns
/// `{"l1-l2": [(s_l1, s_l2), ...]}`.
#[pyfunction]
#[pyo3(signature = (corpora, pivot = "en", xprod_cap = Some(64)))]
fn mine(corpora: Vec<PyCorpus>, pivot: &str, xprod_cap: Option<usize>) -> PyResult<BTreeMap<String, Vec<(String, String)>>> {
    let pivot = lang(pivot)?;
    let corpora = corpora
        .into_iter()
        .map(|(s, t, pairs)| BitextCorpus::from_texts(lang(&s)?, lang(&t)?, pairs).map_err(value_err))
        .collect::<PyResult<Vec<_>>>()?;
    let mut languages: Vec<LanguageCode> = corpora
        .iter()
        .flat_map(|c| [c.src_lang(), c.tgt_lang()])
        .filter(|l| *l != pivot)
        .collect();
    languages.sort();
    languages.dedup();
    let index = pivot::build_pivot_index(&corpora, pivot).map_err(value_err)?;
    let set = pivot::mine_all(&index, &languages, &MiningConfig { xprod_cap }).map_err(value_err)?;
    Ok(set
        .iter()
        .map(|(pair, m)| {
            let pairs = m.corpus.iter().map(|p| (p.src().to_string(), p.tgt().to_string())).collect();
            (pair.to_string(), pairs)
        })
        .collect())
}

/// Parses a pair-count matrix TSV; returns `(column_sums, grand_total, unique_pairs)`
/// with the English column first in the sums.
#[pyfunction]
fn stats_table(tsv: &str) -> PyResult<(Vec<u64>, u64, u64)> {
    let m = StatsMatrix::parse_tsv(tsv, LanguageRegistry::builtin()).map_err(value_err)?;
    let sums = std::iter::once(m.english_total()).chain(m.column_sums()).collect();
    Ok((sums, m.grand_total(), m.unique_pairs()))
}

#[pyfunction]
fn select_spanning_pairs(languages: Vec<String>, n_pairs: usize, seed: u64) -> PyResult<Vec<String>> {
    let langs = languages.iter().map(|l| lang(l)).collect::<PyResult<Vec<_>>>()?;
    let pairs = sampler::select_spanning_pairs(&langs, n_pairs, seed).map_err(value_err)?;
    Ok(pairs.iter().map(ToString::to_string).collect())
}

#[pyfunction]
fn derive_seed(seed: u64, label: &str) -> u64 {
    sampler::derive_seed(seed, label)
}

/// `k` sorted indices drawn without replacement from `0..n`.
#[pyfunction]
fn sample_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    SeededRng::new(seed).sample_indices(n, k)
}

#[pyfunction]
#[pyo3(signature = (hyps, refs, tokenize = "13a"))]
fn bleu(hyps: Vec<String>, refs: Vec<String>, tokenize: &str) -> PyResult<(f64, String)> {
    let tok = match tokenize {
        "13a" => BleuTokenize::Thirteen,
        "none" => BleuTokenize::None,
        other => return Err(value_err(format!("unknown tokenizer {other:?}"))),
    };
    let s = metrics::bleu(&hyps, &refs, tok).map_err(value_err)?;
    Ok((s.value, s.signature))
}

#[pyfunction]
fn chrf2(hyps: Vec<String>, refs: Vec<String>) -> PyResult<(f64, String)> {
    let s = metrics::chrf2(&hyps, &refs).map_err(value_err)?;
    Ok((s.value, s.signature))
}

/// Mean per-row cosine (×100) between two equally long lists of vectors.
#[pyfunction]
fn cosine_batch(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<f64> {
    let dim = a.first().map_or(0, Vec::len);
    let ta = EmbeddingTable::from_vectors(dim, a).map_err(value_err)?;
    let tb = EmbeddingTable::from_vectors(dim, b).map_err(value_err)?;
    Ok(metrics::cosine_batch(&ta, &tb).map_err(value_err)?.value)
}

/// Runs every stage from a TOML config and returns the run report as JSON.
#[pyfunction]
#[pyo3(signature = (config, work = None))]
fn run_pipeline(py: Python<'_>, config: PathBuf, work: Option<PathBuf>) -> PyResult<String> {
    let mut cfg = PipelineConfig::load(&config).map_err(value_err)?;
    if let Some(w) = work {
        cfg.paths.work = w;
    }
    let report = py.detach(|| pipeline::run_pipeline(&cfg)).map_err(value_err)?;
    Ok(report.to_json())
}

#[pymodule]
fn multibridge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("TAG_PATTERN", tagger::TAG_PATTERN)?;
    m.add_class::<PyBpeModel>()?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(to_devanagari, m)?)?;
    m.add_function(wrap_pyfunction!(from_devanagari, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(detokenize, m)?)?;
    m.add_function(wrap_pyfunction!(preprocess, m)?)?;
    m.add_function(wrap_pyfunction!(tag, m)?)?;
    m.add_function(wrap_pyfunction!(untag, m)?)?;
    m.add_function(wrap_pyfunction!(revert_bpe, m)?)?;
    m.add_function(wrap_pyfunction!(mine, m)?)?;
    m.add_function(wrap_pyfunction!(stats_table, m)?)?;
    m.add_function(wrap_pyfunction!(select_spanning_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(derive_seed, m)?)?;
    m.add_function(wrap_pyfunction!(sample_indices, m)?)?;
    m.add_function(wrap_pyfunction!(bleu, m)?)?;
    m.add_function(wrap_pyfunction!(chrf2, m)?)?;
    m.add_function(wrap_pyfunction!(cosine_batch, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    Ok(())
}
