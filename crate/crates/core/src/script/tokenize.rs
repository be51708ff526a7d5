use std::sync::OnceLock;

use regex::Regex;

use crate::corpus::{LanguageCode, Script};

struct Rules13a {
    punct: Regex,
    period_comma_after: Regex,
    period_comma_before: Regex,
    dash_after_digit: Regex,
    spaces: Regex,
}

fn rules_13a() -> &'static Rules13a {
    static RULES: OnceLock<Rules13a> = OnceLock::new();
    RULES.get_or_init(|| Rules13a {
        punct: Regex::new(r"([\{-\~\[-` -\&\(-\+:-@/])").unwrap(),
        period_comma_after: Regex::new(r"([^0-9])([\.,])").unwrap(),
        period_comma_before: Regex::new(r"([\.,])([^0-9])").unwrap(),
        dash_after_digit: Regex::new(r"([0-9])(-)").unwrap(),
        // Python's \s also covers the information separators U+001C..U+001F.
        spaces: Regex::new(r"[\s\x1C-\x1F]+").unwrap(),
    })
}

fn is_py_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1C}'..='\u{1F}').contains(&c)
}

/// The mteval-v13a tokenizer as used for BLEU, returning the space-joined
/// token string.
pub fn tokenize_13a(line: &str) -> String {
    let mut line = line
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let rules = rules_13a();
    let line = format!(" {line} ");
    let line = rules.punct.replace_all(&line, " $1 ");
    let line = rules.period_comma_after.replace_all(&line, "$1 $2 ");
    let line = rules.period_comma_before.replace_all(&line, " $1 $2");
    let line = rules.dash_after_digit.replace_all(&line, "$1 $2 ");
    let line = rules.spaces.replace_all(&line, " ");
    line.trim_matches(is_py_space).to_string()
}

struct IndicRules {
    punct: Regex,
    spaces: Regex,
    number_seq: Regex,
    left_right_attach: Regex,
    left_attach: Regex,
    right_attach: Regex,
}

fn indic_rules() -> &'static IndicRules {
    static RULES: OnceLock<IndicRules> = OnceLock::new();
    RULES.get_or_init(|| IndicRules {
        // ASCII punctuation, danda, double danda and Meetei/Ol Chiki marks.
        punct: Regex::new(
            r##"([!"#$%&'()*+,\-./:;<=>?@\[\\\]^_`{|}~\x{0964}\x{0965}\x{AAF1}\x{AAF0}\x{ABEB}\x{ABEC}\x{ABED}\x{ABEE}\x{ABEF}\x{1C7E}\x{1C7F}])"##,
        )
        .unwrap(),
        spaces: Regex::new("[ ]+").unwrap(),
        number_seq: Regex::new(r"([0-9]+ [,.:/] )+[0-9]+").unwrap(),
        left_right_attach: Regex::new(r"[ ]([-/\\])[ ]").unwrap(),
        left_attach: Regex::new(r"[ ]([!%)\]},.:;>?\x{0964}\x{0965}])").unwrap(),
        right_attach: Regex::new(r"([#$(\[{<@])[ ]").unwrap(),
    })
}

/// Removes the spaces inside `1 , 000`-style number sequences. A sequence
/// starting at offset 0 is left alone, as the reference tokenizer does.
fn join_number_sequences(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut prev = 0;
    for m in indic_rules().number_seq.find_iter(s) {
        if m.start() > prev {
            out.push_str(&s[prev..m.start()]);
            out.extend(m.as_str().chars().filter(|c| *c != ' '));
            prev = m.end();
        }
    }
    out.push_str(&s[prev..]);
    out
}

/// Punctuation-boundary tokenizer for Brahmic-script text.
pub fn tokenize_indic(text: &str) -> Vec<String> {
    let rules = indic_rules();
    let spaced = rules.punct.replace_all(&text.replace('\t', " "), " $1 ").into_owned();
    let collapsed = rules.spaces.replace_all(&spaced, " ");
    let joined = join_number_sequences(collapsed.trim_matches(' '));
    if joined.is_empty() {
        return Vec::new();
    }
    joined.split(' ').map(str::to_string).collect()
}

/// 13a rules for Latin-script languages, punctuation splitting otherwise.
pub fn tokenize(text: &str, lang: LanguageCode) -> Vec<String> {
    match lang.script() {
        Script::Latin => {
            let joined = tokenize_13a(text);
            if joined.is_empty() {
                Vec::new()
            } else {
                joined.split(' ').map(str::to_string).collect()
            }
        }
        _ => tokenize_indic(text),
    }
}

/// Joins tokens and reattaches punctuation: closing marks and dandas to the
/// left, opening marks to the right, `-` `/` `\` to both sides, and straight
/// quotes alternating open/close.
pub fn detokenize<S: AsRef<str>>(tokens: &[S], _lang: LanguageCode) -> String {
    let rules = indic_rules();
    let text = tokens
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join(" ");
    let s = join_number_sequences(&text);
    let s = rules.left_right_attach.replace_all(&s, "$1");
    let s = rules.left_attach.replace_all(&s, "$1");
    let mut s = rules.right_attach.replace_all(&s, "$1").into_owned();

    const OPEN: char = '\u{E000}';
    const CLOSE: char = '\u{E001}';
    for quote in ['\'', '"', '`'] {
        let mut count = 0usize;
        let marked: String = s
            .chars()
            .map(|c| {
                if c == quote {
                    count += 1;
                    if count % 2 == 1 {
                        OPEN
                    } else {
                        CLOSE
                    }
                } else {
                    c
                }
            })
            .collect();
        let q = quote.to_string();
        s = marked
            .replace(&format!("{OPEN} "), &q)
            .replace(&format!(" {CLOSE}"), &q)
            .replace([OPEN, CLOSE], &q);
    }
    s
}
