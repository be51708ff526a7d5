use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::BpeError;
use crate::tagger::is_tag;

pub const END_OF_WORD: &str = "</w>";
pub const CONTINUATION: &str = "@@";

const HEADER_PREFIX: &str = "#version: 0.2";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    vocab: Option<BTreeMap<String, u64>>,
    num_merges: usize,
    min_frequency: u64,
    ranks: HashMap<(String, String), usize>,
    // Merged symbol -> the earliest merge producing it.
    reverse: HashMap<String, (String, String)>,
}

impl BpeModel {
    pub(crate) fn from_merges(
        merges: Vec<(String, String)>,
        num_merges: usize,
        min_frequency: u64,
    ) -> Self {
        let mut ranks = HashMap::with_capacity(merges.len());
        let mut reverse = HashMap::with_capacity(merges.len());
        for (i, (l, r)) in merges.iter().enumerate() {
            ranks.entry((l.clone(), r.clone())).or_insert(i);
            reverse
                .entry(format!("{l}{r}"))
                .or_insert_with(|| (l.clone(), r.clone()));
        }
        BpeModel {
            merges,
            vocab: None,
            num_merges,
            min_frequency,
            ranks,
            reverse,
        }
    }

    /// Recomputes the vocabulary by segmenting the training words with the
    /// merges alone and keeping subwords seen at least `min_frequency` times.
    pub(crate) fn build_vocab<'a>(&mut self, words: impl IntoIterator<Item = (&'a str, u64)>) {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for (word, freq) in words {
            for piece in self.segment_unfiltered(word) {
                *counts.entry(piece).or_insert(0) += freq;
            }
        }
        counts.retain(|_, c| *c >= self.min_frequency);
        self.vocab = Some(counts);
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    /// `None` when the model was loaded without a vocabulary sidecar, in
    /// which case no frequency filtering is applied.
    pub fn vocab(&self) -> Option<&BTreeMap<String, u64>> {
        self.vocab.as_ref()
    }

    fn known(&self, symbol: &str) -> bool {
        self.vocab.as_ref().is_none_or(|v| v.contains_key(symbol))
    }

    pub fn num_merges(&self) -> usize {
        self.num_merges
    }

    pub fn min_frequency(&self) -> u64 {
        self.min_frequency
    }

    /// Applies merges to one word, returning symbols with `</w>` removed.
    fn merge_word(&self, word: &str) -> Vec<String> {
        let chars: Vec<char> = word.chars().collect();
        let mut syms: Vec<String> = chars
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i + 1 == chars.len() {
                    format!("{c}{END_OF_WORD}")
                } else {
                    c.to_string()
                }
            })
            .collect();
        while syms.len() > 1 {
            let best = syms
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].clone(), w[1].clone())).copied())
                .min();
            let Some(rank) = best else { break };
            let (l, r) = &self.merges[rank];
            let mut out = Vec::with_capacity(syms.len());
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && &syms[i] == l && &syms[i + 1] == r {
                    out.push(format!("{l}{r}"));
                    i += 2;
                } else {
                    out.push(std::mem::take(&mut syms[i]));
                    i += 1;
                }
            }
            syms = out;
        }
        if let Some(last) = syms.last_mut() {
            if last == END_OF_WORD {
                syms.pop();
            } else if let Some(stripped) = last.strip_suffix(END_OF_WORD) {
                *last = stripped.to_string();
            }
        }
        syms
    }

    fn mark(mut pieces: Vec<String>) -> Vec<String> {
        // A final piece ending in "@@" would read as a continuation; peel
        // its last character off so the stream stays unambiguous.
        if let Some(last) = pieces.pop_if(|l| l.len() > 1 && l.ends_with(CONTINUATION)) {
            let cut = last.char_indices().last().unwrap().0;
            pieces.push(last[..cut].to_string());
            pieces.push(last[cut..].to_string());
        }
        let n = pieces.len();
        pieces
            .into_iter()
            .enumerate()
            .map(|(i, p)| if i + 1 < n { format!("{p}{CONTINUATION}") } else { p })
            .collect()
    }

    fn segment_unfiltered(&self, word: &str) -> Vec<String> {
        if word.chars().count() <= 1 {
            return vec![word.to_string()];
        }
        Self::mark(self.merge_word(word))
    }

    fn recursive_split(&self, segment: &str, is_final: bool, out: &mut Vec<String>) {
        let parts = if is_final {
            self.reverse
                .get(&format!("{segment}{END_OF_WORD}"))
                .map(|(l, r)| (l.clone(), r.strip_suffix(END_OF_WORD).unwrap_or(r).to_string()))
        } else {
            self.reverse.get(segment).cloned()
        };
        let Some((left, right)) = parts else {
            out.push(segment.to_string());
            return;
        };
        if self.known(&format!("{left}{CONTINUATION}")) {
            out.push(left);
        } else {
            self.recursive_split(&left, false, out);
        }
        let right_known = if is_final {
            self.known(&right)
        } else {
            self.known(&format!("{right}{CONTINUATION}"))
        };
        if right_known {
            out.push(right);
        } else {
            self.recursive_split(&right, is_final, out);
        }
    }

    /// Segments one token. Tag tokens and single characters pass through.
    pub fn apply_token(&self, token: &str) -> Vec<String> {
        if is_tag(token) || token.chars().count() <= 1 {
            return vec![token.to_string()];
        }
        let merged = self.merge_word(token);
        if self.vocab.is_none() {
            return Self::mark(merged);
        }
        let n = merged.len();
        let mut pieces = Vec::with_capacity(n);
        for (i, seg) in merged.iter().enumerate() {
            let is_final = i + 1 == n;
            let key = if is_final {
                seg.clone()
            } else {
                format!("{seg}{CONTINUATION}")
            };
            if self.known(&key) {
                pieces.push(seg.clone());
            } else {
                self.recursive_split(seg, is_final, &mut pieces);
            }
        }
        Self::mark(pieces)
    }

    pub fn apply<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        tokens
            .iter()
            .flat_map(|t| self.apply_token(t.as_ref()))
            .collect()
    }

    pub fn apply_line(&self, line: &str) -> String {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        self.apply(&tokens).join(" ")
    }

    /// Segments lines in parallel. Output order matches input order.
    pub fn apply_lines<S: AsRef<str> + Sync>(&self, lines: &[S]) -> Vec<String> {
        lines.par_iter().map(|l| self.apply_line(l.as_ref())).collect()
    }

    pub fn to_codes_string(&self) -> String {
        let mut s = format!(
            "{HEADER_PREFIX} num_merges={} min_frequency={}\n",
            self.num_merges, self.min_frequency
        );
        for (l, r) in &self.merges {
            let _ = writeln!(s, "{l} {r}");
        }
        s
    }

    pub fn to_vocab_string(&self) -> String {
        let mut entries: Vec<(&String, &u64)> = self.vocab.iter().flatten().collect();
        entries.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        let mut s = String::new();
        for (sym, c) in entries {
            let _ = writeln!(s, "{sym} {c}");
        }
        s
    }

    pub fn vocab_path(codes: &Path) -> PathBuf {
        let mut p = codes.as_os_str().to_owned();
        p.push(".vocab");
        PathBuf::from(p)
    }

    /// Writes the codes file and, when the model has a vocabulary, its
    /// `.vocab` sidecar.
    pub fn save(&self, path: &Path) -> Result<(), BpeError> {
        let io = |p: &Path| {
            let p = p.to_path_buf();
            move |source| BpeError::Io { path: p, source }
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(io(parent))?;
        }
        fs::write(path, self.to_codes_string()).map_err(io(path))?;
        if self.vocab.is_some() {
            let vp = Self::vocab_path(path);
            fs::write(&vp, self.to_vocab_string()).map_err(io(&vp))?;
        }
        Ok(())
    }

    pub fn parse(codes: &str, vocab: Option<&str>, path: &Path) -> Result<Self, BpeError> {
        let bad = |line: usize, reason: String| BpeError::MalformedModel {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let mut lines = codes.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty model file".into()))?;
        let rest = header
            .strip_prefix(HEADER_PREFIX)
            .ok_or_else(|| bad(1, format!("expected header starting with {HEADER_PREFIX:?}")))?;
        let mut num_merges = None;
        let mut min_frequency = None;
        for field in rest.split_whitespace() {
            match field.split_once('=') {
                Some(("num_merges", v)) => num_merges = v.parse().ok(),
                Some(("min_frequency", v)) => min_frequency = v.parse().ok(),
                _ => return Err(bad(1, format!("unknown header field {field:?}"))),
            }
        }
        let (Some(num_merges), Some(min_frequency)) = (num_merges, min_frequency) else {
            return Err(bad(1, "header needs num_merges and min_frequency".into()));
        };
        let mut merges = Vec::new();
        for (i, line) in lines.enumerate() {
            let mut it = line.split(' ');
            match (it.next(), it.next(), it.next()) {
                (Some(l), Some(r), None) if !l.is_empty() && !r.is_empty() => {
                    merges.push((l.to_string(), r.to_string()))
                }
                _ => return Err(bad(i + 2, format!("expected \"left right\", got {line:?}"))),
            }
        }
        if merges.len() > num_merges {
            return Err(bad(1, format!("{} merges exceed num_merges={num_merges}", merges.len())));
        }
        let mut model = BpeModel::from_merges(merges, num_merges, min_frequency);
        if let Some(vocab) = vocab {
            let mut table = BTreeMap::new();
            for (i, line) in vocab.lines().enumerate() {
                let parsed = line
                    .split_once(' ')
                    .and_then(|(s, c)| Some((s.to_string(), c.parse::<u64>().ok()?)));
                let Some((sym, count)) = parsed else {
                    return Err(bad(i + 1, format!("bad vocab line {line:?}")));
                };
                table.insert(sym, count);
            }
            model.vocab = Some(table);
        }
        Ok(model)
    }

    /// Loads a codes file and, if present, its `.vocab` sidecar.
    pub fn load(path: &Path) -> Result<Self, BpeError> {
        let codes = fs::read_to_string(path).map_err(|source| BpeError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let vp = Self::vocab_path(path);
        let vocab = match fs::read_to_string(&vp) {
            Ok(v) => Some(v),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
            Err(source) => return Err(BpeError::Io { path: vp, source }),
        };
        Self::parse(&codes, vocab.as_deref(), path)
    }
}

/// Joins `@@`-continued subwords back into tokens.
pub fn revert_bpe<S: AsRef<str>>(subwords: &[S]) -> Result<Vec<String>, BpeError> {
    let mut out = Vec::new();
    let mut pending = String::new();
    let mut last_piece = "";
    for piece in subwords {
        let piece = piece.as_ref();
        match piece.strip_suffix(CONTINUATION) {
            Some(stem) => {
                pending.push_str(stem);
                last_piece = piece;
            }
            _ => {
                pending.push_str(piece);
                out.push(std::mem::take(&mut pending));
                last_piece = "";
            }
        }
    }
    if !last_piece.is_empty() {
        return Err(BpeError::DanglingContinuation(last_piece.to_string()));
    }
    Ok(out)
}

pub fn revert_line(line: &str) -> Result<String, BpeError> {
    let pieces: Vec<&str> = line.split_whitespace().collect();
    Ok(revert_bpe(&pieces)?.join(" "))
}
