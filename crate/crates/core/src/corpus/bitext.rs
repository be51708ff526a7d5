use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{CorpusError, LanguageCode, TranslationDirection};

/// One aligned sentence pair. Both sides are non-blank and single-line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentencePair {
    src: String,
    tgt: String,
}

fn check_text(text: &str) -> Result<(), CorpusError> {
    if text.contains(['\n', '\r']) {
        return Err(CorpusError::EmbeddedNewline);
    }
    if text.trim().is_empty() {
        return Err(CorpusError::EmptyText);
    }
    Ok(())
}

impl SentencePair {
    pub fn new(src: impl Into<String>, tgt: impl Into<String>) -> Result<Self, CorpusError> {
        let (src, tgt) = (src.into(), tgt.into());
        check_text(&src)?;
        check_text(&tgt)?;
        Ok(SentencePair { src, tgt })
    }

    pub fn src(&self) -> &str {
        &self.src
    }

    pub fn tgt(&self) -> &str {
        &self.tgt
    }

    pub fn swapped(&self) -> SentencePair {
        SentencePair {
            src: self.tgt.clone(),
            tgt: self.src.clone(),
        }
    }

    pub fn into_parts(self) -> (String, String) {
        (self.src, self.tgt)
    }
}

/// Sentence pairs between a fixed `src_lang → tgt_lang`, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitextCorpus {
    src_lang: LanguageCode,
    tgt_lang: LanguageCode,
    pairs: Vec<SentencePair>,
}

impl BitextCorpus {
    pub fn new(
        src_lang: LanguageCode,
        tgt_lang: LanguageCode,
        pairs: Vec<SentencePair>,
    ) -> Result<Self, CorpusError> {
        if src_lang == tgt_lang {
            return Err(CorpusError::SameLanguage(src_lang));
        }
        Ok(BitextCorpus {
            src_lang,
            tgt_lang,
            pairs,
        })
    }

    pub fn empty(src_lang: LanguageCode, tgt_lang: LanguageCode) -> Result<Self, CorpusError> {
        BitextCorpus::new(src_lang, tgt_lang, Vec::new())
    }

    /// Builds a corpus from raw `(src, tgt)` strings, validating every pair.
    pub fn from_texts<S: Into<String>, T: Into<String>>(
        src_lang: LanguageCode,
        tgt_lang: LanguageCode,
        texts: impl IntoIterator<Item = (S, T)>,
    ) -> Result<Self, CorpusError> {
        let pairs = texts
            .into_iter()
            .map(|(s, t)| SentencePair::new(s, t))
            .collect::<Result<Vec<_>, _>>()?;
        BitextCorpus::new(src_lang, tgt_lang, pairs)
    }

    pub fn src_lang(&self) -> LanguageCode {
        self.src_lang
    }

    pub fn tgt_lang(&self) -> LanguageCode {
        self.tgt_lang
    }

    pub fn direction(&self) -> TranslationDirection {
        TranslationDirection {
            src: self.src_lang,
            tgt: self.tgt_lang,
        }
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SentencePair> {
        self.pairs.iter()
    }

    /// Same pairs with the two sides exchanged.
    pub fn swapped(&self) -> BitextCorpus {
        BitextCorpus {
            src_lang: self.tgt_lang,
            tgt_lang: self.src_lang,
            pairs: self.pairs.iter().map(SentencePair::swapped).collect(),
        }
    }

    /// Keeps the pairs at the given (ascending) indices.
    pub fn select(&self, indices: &[usize]) -> BitextCorpus {
        BitextCorpus {
            src_lang: self.src_lang,
            tgt_lang: self.tgt_lang,
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
        }
    }

    /// The side written in `lang`, if the corpus has one.
    pub fn side(&self, lang: LanguageCode) -> Option<impl Iterator<Item = &str>> {
        let src = if lang == self.src_lang {
            true
        } else if lang == self.tgt_lang {
            false
        } else {
            return None;
        };
        Some(
            self.pairs
                .iter()
                .map(move |p| if src { p.src() } else { p.tgt() }),
        )
    }
}

/// Reads a text file as lines, validating UTF-8 and rejecting blank lines.
/// A trailing newline does not start a new line; a trailing `\r` is dropped.
pub(crate) fn read_lines(path: &Path) -> Result<Vec<String>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut lines = Vec::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| CorpusError::io(path, e))?;
        if n == 0 {
            break;
        }
        let line_no = lines.len() + 1;
        if buf.last() == Some(&b'\n') {
            buf.pop();
        }
        if buf.last() == Some(&b'\r') {
            buf.pop();
        }
        let text = String::from_utf8(std::mem::take(&mut buf)).map_err(|_| {
            CorpusError::InvalidUtf8 {
                path: path.to_path_buf(),
                line: line_no,
            }
        })?;
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyLine {
                path: path.to_path_buf(),
                line: line_no,
            });
        }
        lines.push(text);
    }
    Ok(lines)
}

/// Loads a line-aligned pair of plain-text files.
pub fn load_bitext(
    src_path: impl AsRef<Path>,
    tgt_path: impl AsRef<Path>,
    src_lang: LanguageCode,
    tgt_lang: LanguageCode,
) -> Result<BitextCorpus, CorpusError> {
    let src = read_lines(src_path.as_ref())?;
    let tgt = read_lines(tgt_path.as_ref())?;
    if src.len() != tgt.len() {
        return Err(CorpusError::LineCountMismatch(src.len(), tgt.len()));
    }
    // Lines are already validated, so the pair invariants hold.
    let pairs = src
        .into_iter()
        .zip(tgt)
        .map(|(src, tgt)| SentencePair { src, tgt })
        .collect();
    BitextCorpus::new(src_lang, tgt_lang, pairs)
}

pub(crate) fn write_lines<'a>(
    path: &Path,
    lines: impl IntoIterator<Item = &'a str>,
) -> Result<(), CorpusError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CorpusError::io(parent, e))?;
        }
    }
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for line in lines {
        out.write_all(line.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .map_err(|e| CorpusError::io(path, e))?;
    }
    out.flush().map_err(|e| CorpusError::io(path, e))
}

/// Writes the two sides as LF-terminated plain-text files.
pub fn write_bitext(
    corpus: &BitextCorpus,
    src_path: impl AsRef<Path>,
    tgt_path: impl AsRef<Path>,
) -> Result<(), CorpusError> {
    write_lines(src_path.as_ref(), corpus.iter().map(SentencePair::src))?;
    write_lines(tgt_path.as_ref(), corpus.iter().map(SentencePair::tgt))
}

/// Reads `src<TAB>tgt` lines without a header.
pub fn read_tsv(
    path: impl AsRef<Path>,
    src_lang: LanguageCode,
    tgt_lang: LanguageCode,
) -> Result<BitextCorpus, CorpusError> {
    let path = path.as_ref();
    let lines = read_lines(path)?;
    let mut pairs = Vec::with_capacity(lines.len());
    for (i, line) in lines.into_iter().enumerate() {
        let malformed = || CorpusError::MalformedTsv {
            path: path.to_path_buf(),
            line: i + 1,
        };
        let (src, tgt) = line.split_once('\t').ok_or_else(malformed)?;
        if tgt.contains('\t') {
            return Err(malformed());
        }
        let pair = SentencePair::new(src, tgt).map_err(|_| CorpusError::EmptyLine {
            path: path.to_path_buf(),
            line: i + 1,
        })?;
        pairs.push(pair);
    }
    BitextCorpus::new(src_lang, tgt_lang, pairs)
}

pub fn write_tsv(corpus: &BitextCorpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let mut lines = Vec::with_capacity(corpus.len());
    for (index, pair) in corpus.iter().enumerate() {
        if pair.src.contains('\t') || pair.tgt.contains('\t') {
            return Err(CorpusError::TabInText { index });
        }
        lines.push(format!("{}\t{}", pair.src, pair.tgt));
    }
    write_lines(path.as_ref(), lines.iter().map(String::as_str))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lang(code: &str) -> LanguageCode {
        code.parse().unwrap()
    }

    #[test]
    fn loads_aligned_files_in_order() {
        let dir = tempfile::tempdir().unwrap();
        let (s, t) = (dir.path().join("a.en"), dir.path().join("a.hi"));
        std::fs::write(&s, "one\ntwo\nthree\n").unwrap();
        std::fs::write(&t, "एक\nदो\nतीन\n").unwrap();
        let corpus = load_bitext(&s, &t, lang("en"), lang("hi")).unwrap();
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.pairs()[1].src(), "two");
        assert_eq!(corpus.pairs()[2].tgt(), "तीन");
    }

    #[test]
    fn unequal_line_counts_are_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let (s, t) = (dir.path().join("a.en"), dir.path().join("a.hi"));
        std::fs::write(&s, "1\n2\n3\n").unwrap();
        std::fs::write(&t, "1\n2\n3\n4\n").unwrap();
        let err = load_bitext(&s, &t, lang("en"), lang("hi")).unwrap_err();
        assert!(matches!(err, CorpusError::LineCountMismatch(3, 4)));
    }

    #[test]
    fn blank_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let (s, t) = (dir.path().join("a.en"), dir.path().join("a.hi"));
        std::fs::write(&s, "1\n   \n3\n").unwrap();
        std::fs::write(&t, "1\n2\n3\n").unwrap();
        let err = load_bitext(&s, &t, lang("en"), lang("hi")).unwrap_err();
        assert!(matches!(err, CorpusError::EmptyLine { line: 2, .. }));
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let (s, t) = (dir.path().join("a.en"), dir.path().join("a.hi"));
        std::fs::write(&s, b"ok\n\xff\xfe\n").unwrap();
        std::fs::write(&t, "1\n2\n").unwrap();
        let err = load_bitext(&s, &t, lang("en"), lang("hi")).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidUtf8 { line: 2, .. }));
    }

    #[test]
    fn empty_corpus_writes_empty_files() {
        let dir = tempfile::tempdir().unwrap();
        let (s, t) = (dir.path().join("e.en"), dir.path().join("e.bn"));
        let corpus = BitextCorpus::empty(lang("en"), lang("bn")).unwrap();
        write_bitext(&corpus, &s, &t).unwrap();
        assert_eq!(std::fs::metadata(&s).unwrap().len(), 0);
        assert_eq!(std::fs::metadata(&t).unwrap().len(), 0);
        assert_eq!(load_bitext(&s, &t, lang("en"), lang("bn")).unwrap(), corpus);
    }

    #[test]
    fn two_pair_corpus_writes_two_lines() {
        let dir = tempfile::tempdir().unwrap();
        let (s, t) = (dir.path().join("x.en"), dir.path().join("x.ta"));
        let corpus =
            BitextCorpus::from_texts(lang("en"), lang("ta"), [("a", "அ"), ("b", "ஆ")]).unwrap();
        write_bitext(&corpus, &s, &t).unwrap();
        assert_eq!(std::fs::read_to_string(&s).unwrap(), "a\nb\n");
        assert_eq!(std::fs::read_to_string(&t).unwrap(), "அ\nஆ\n");
    }

    #[test]
    fn sentence_pair_invariants() {
        assert!(matches!(
            SentencePair::new(" ", "x"),
            Err(CorpusError::EmptyText)
        ));
        assert!(matches!(
            SentencePair::new("a\nb", "x"),
            Err(CorpusError::EmbeddedNewline)
        ));
        assert!(BitextCorpus::empty(lang("hi"), lang("hi")).is_err());
    }

    #[test]
    fn tsv_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bn-hi.tsv");
        let corpus =
            BitextCorpus::from_texts(lang("bn"), lang("hi"), [("আমি", "मैं"), ("তুমি", "तुम")])
                .unwrap();
        write_tsv(&corpus, &path).unwrap();
        assert_eq!(read_tsv(&path, lang("bn"), lang("hi")).unwrap(), corpus);

        std::fs::write(&path, "only one column\n").unwrap();
        assert!(matches!(
            read_tsv(&path, lang("bn"), lang("hi")),
            Err(CorpusError::MalformedTsv { line: 1, .. })
        ));
        let tabbed = BitextCorpus::from_texts(lang("bn"), lang("hi"), [("a\tb", "c")]).unwrap();
        assert!(matches!(
            write_tsv(&tabbed, &path),
            Err(CorpusError::TabInText { index: 0 })
        ));
    }

    fn sentence() -> impl Strategy<Value = String> {
        "[a-zA-Z0-9 ,.!?\u{0900}-\u{097f}\u{0980}-\u{09ff}é]{0,12}"
            .prop_map(|s| format!("x{s}"))
    }

    proptest! {
        #[test]
        fn write_then_load_is_identity(
            texts in proptest::collection::vec((sentence(), sentence()), 0..20)
        ) {
            let dir = tempfile::tempdir().unwrap();
            let (s, t) = (dir.path().join("c.bn"), dir.path().join("c.en"));
            let corpus = BitextCorpus::from_texts(lang("bn"), lang("en"), texts).unwrap();
            write_bitext(&corpus, &s, &t).unwrap();
            let loaded = load_bitext(&s, &t, lang("bn"), lang("en")).unwrap();
            prop_assert_eq!(&loaded, &corpus);
            let before = (std::fs::read(&s).unwrap(), std::fs::read(&t).unwrap());
            write_bitext(&loaded, &s, &t).unwrap();
            prop_assert_eq!(before, (std::fs::read(&s).unwrap(), std::fs::read(&t).unwrap()));
        }
    }
}
