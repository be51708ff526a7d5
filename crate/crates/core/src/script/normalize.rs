use unicode_normalization::UnicodeNormalization;

/// Precomposed nukta letters that NFC keeps composed, with the base + nukta
/// form used instead.
///
/// The other nukta letters (U+0958..U+095F, Bengali U+09DC/09DD/09DF,
/// Gurmukhi U+0A33/0A36/0A59..0A5B/0A5E, Oriya U+0B5C/0B5D) are composition
/// exclusions, so NFC already decomposes them. Decomposing these three as
/// well gives one spelling for every nukta consonant.
pub const NUKTA_DECOMPOSITIONS: [(char, &str); 3] = [
    ('\u{0929}', "\u{0928}\u{093C}"),
    ('\u{0931}', "\u{0930}\u{093C}"),
    ('\u{0934}', "\u{0933}\u{093C}"),
];

/// NFC followed by the nukta table. Idempotent.
pub fn normalize_unicode(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.nfc() {
        match NUKTA_DECOMPOSITIONS.iter().find(|(from, _)| *from == c) {
            Some((_, to)) => out.push_str(to),
            None => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_and_nfc_text_unchanged() {
        assert_eq!(normalize_unicode("Hello, world."), "Hello, world.");
        assert_eq!(normalize_unicode("नमस्ते दुनिया"), "नमस्ते दुनिया");
        assert_eq!(normalize_unicode("café"), "café");
    }

    // Expected strings below were produced with Python's
    // unicodedata.normalize("NFC", ...) on Unicode 13.
    #[test]
    fn nukta_forms_share_one_spelling() {
        // QA: NFC("क़") == "क़" and NFC leaves the pair alone.
        assert_eq!(normalize_unicode("\u{0958}"), "\u{0915}\u{093C}");
        assert_eq!(normalize_unicode("\u{0915}\u{093C}"), "\u{0915}\u{093C}");
        // NNNA: NFC("ऩ") == "ऩ"; the table undoes that.
        assert_eq!(normalize_unicode("\u{0928}\u{093C}"), "\u{0928}\u{093C}");
        assert_eq!(normalize_unicode("\u{0929}"), "\u{0928}\u{093C}");
        // Bengali RRA: NFC("ড়") == "ড়".
        assert_eq!(normalize_unicode("\u{09DC}"), "\u{09A1}\u{09BC}");
    }

    #[test]
    fn composes_decomposed_vowel_signs() {
        // NFC("ୋ") == "ୋ" (Oriya O).
        assert_eq!(normalize_unicode("\u{0B47}\u{0B3E}"), "\u{0B4B}");
        // NFC("ো") == "ো" (Bengali O).
        assert_eq!(normalize_unicode("\u{09C7}\u{09BE}"), "\u{09CB}");
    }

    #[test]
    fn idempotent() {
        for s in ["\u{0929}\u{0958}ab", "e\u{0301}", "\u{0B47}\u{0B3E}\u{0931}"] {
            let once = normalize_unicode(s);
            assert_eq!(normalize_unicode(&once), once);
        }
    }
}
