use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CorpusError;

/// Writing system of a language. Brahmic scripts carry the base of their
/// 128-codepoint Unicode block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Script {
    Latin,
    Devanagari,
    Bengali,
    Gurmukhi,
    Gujarati,
    Oriya,
    Tamil,
    Telugu,
    Kannada,
    Malayalam,
}

impl Script {
    /// First codepoint of the script's Unicode block, `None` for Latin.
    pub fn block_base(self) -> Option<u32> {
        match self {
            Script::Latin => None,
            Script::Devanagari => Some(0x0900),
            Script::Bengali => Some(0x0980),
            Script::Gurmukhi => Some(0x0A00),
            Script::Gujarati => Some(0x0A80),
            Script::Oriya => Some(0x0B00),
            Script::Tamil => Some(0x0B80),
            Script::Telugu => Some(0x0C00),
            Script::Kannada => Some(0x0C80),
            Script::Malayalam => Some(0x0D00),
        }
    }

    pub fn is_indic(self) -> bool {
        self.block_base().is_some()
    }

    pub fn name(self) -> &'static str {
        match self {
            Script::Latin => "latin",
            Script::Devanagari => "devanagari",
            Script::Bengali => "bengali",
            Script::Gurmukhi => "gurmukhi",
            Script::Gujarati => "gujarati",
            Script::Oriya => "oriya",
            Script::Tamil => "tamil",
            Script::Telugu => "telugu",
            Script::Kannada => "kannada",
            Script::Malayalam => "malayalam",
        }
    }

    pub const ALL: [Script; 10] = [
        Script::Latin,
        Script::Devanagari,
        Script::Bengali,
        Script::Gurmukhi,
        Script::Gujarati,
        Script::Oriya,
        Script::Tamil,
        Script::Telugu,
        Script::Kannada,
        Script::Malayalam,
    ];
}

impl FromStr for Script {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Script::ALL
            .into_iter()
            .find(|script| script.name() == s)
            .ok_or_else(|| CorpusError::InvalidRegistry(format!("unknown script {s:?}")))
    }
}

/// A two-letter language code resolved against a [`LanguageRegistry`].
///
/// Equality and ordering follow the code; the script is carried along so
/// script-dependent stages don't need the registry.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguageCode {
    code: [u8; 2],
    script: Script,
}

impl LanguageCode {
    pub fn as_str(&self) -> &str {
        // Only lowercase ASCII is ever stored.
        std::str::from_utf8(&self.code).expect("ascii language code")
    }

    pub fn script(&self) -> Script {
        self.script
    }

    /// Parses against the built-in registry.
    pub fn parse(code: &str) -> Result<Self, CorpusError> {
        LanguageRegistry::builtin().lookup(code)
    }

    fn check_syntax(code: &str) -> Result<[u8; 2], CorpusError> {
        let bytes = code.as_bytes();
        if bytes.len() == 2 && bytes.iter().all(u8::is_ascii_lowercase) {
            Ok([bytes[0], bytes[1]])
        } else {
            Err(CorpusError::InvalidLanguageCode(code.to_string()))
        }
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LanguageCode {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LanguageCode::parse(s)
    }
}

impl Serialize for LanguageCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for LanguageCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let code = String::deserialize(deserializer)?;
        LanguageCode::parse(&code).map_err(serde::de::Error::custom)
    }
}

/// The set of languages a run knows about, with exactly one pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageRegistry {
    languages: BTreeMap<String, Script>,
    pivot: String,
}

#[derive(Deserialize)]
struct RegistryFile {
    pivot: String,
    languages: BTreeMap<String, String>,
}

impl LanguageRegistry {
    pub fn new(
        languages: impl IntoIterator<Item = (String, Script)>,
        pivot: &str,
    ) -> Result<Self, CorpusError> {
        let mut map = BTreeMap::new();
        for (code, script) in languages {
            LanguageCode::check_syntax(&code)?;
            if map.insert(code.clone(), script).is_some() {
                return Err(CorpusError::InvalidRegistry(format!(
                    "language {code} listed twice"
                )));
            }
        }
        if !map.contains_key(pivot) {
            return Err(CorpusError::InvalidRegistry(format!(
                "pivot {pivot:?} is not a registered language"
            )));
        }
        Ok(LanguageRegistry {
            languages: map,
            pivot: pivot.to_string(),
        })
    }

    /// English plus the ten Indic languages.
    pub fn builtin() -> &'static LanguageRegistry {
        static BUILTIN: OnceLock<LanguageRegistry> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            let entries = [
                ("en", Script::Latin),
                ("bn", Script::Bengali),
                ("gu", Script::Gujarati),
                ("hi", Script::Devanagari),
                ("kn", Script::Kannada),
                ("ml", Script::Malayalam),
                ("mr", Script::Devanagari),
                ("or", Script::Oriya),
                ("pa", Script::Gurmukhi),
                ("ta", Script::Tamil),
                ("te", Script::Telugu),
            ];
            LanguageRegistry::new(
                entries.iter().map(|(c, s)| (c.to_string(), *s)),
                "en",
            )
            .expect("builtin registry is valid")
        })
    }

    /// Parses a TOML registry:
    ///
    /// ```toml
    /// pivot = "en"
    /// [languages]
    /// en = "latin"
    /// hi = "devanagari"
    /// ```
    pub fn from_toml(text: &str) -> Result<Self, CorpusError> {
        let file: RegistryFile =
            toml::from_str(text).map_err(|e| CorpusError::InvalidRegistry(e.to_string()))?;
        let mut entries = Vec::with_capacity(file.languages.len());
        for (code, script) in file.languages {
            entries.push((code, script.parse()?));
        }
        LanguageRegistry::new(entries, &file.pivot)
    }

    pub fn lookup(&self, code: &str) -> Result<LanguageCode, CorpusError> {
        let bytes = LanguageCode::check_syntax(code)?;
        let script = self
            .languages
            .get(code)
            .ok_or_else(|| CorpusError::UnknownLanguage(code.to_string()))?;
        Ok(LanguageCode {
            code: bytes,
            script: *script,
        })
    }

    pub fn pivot(&self) -> LanguageCode {
        self.lookup(&self.pivot).expect("pivot is registered")
    }

    /// All registered languages in code order.
    pub fn languages(&self) -> Vec<LanguageCode> {
        self.languages
            .keys()
            .map(|code| self.lookup(code).expect("registered"))
            .collect()
    }

    /// Registered languages other than the pivot, in code order.
    pub fn non_pivot(&self) -> Vec<LanguageCode> {
        let pivot = self.pivot();
        self.languages()
            .into_iter()
            .filter(|lang| *lang != pivot)
            .collect()
    }
}

/// An ordered `src → tgt` translation direction; `(a, b)` and `(b, a)` differ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TranslationDirection {
    pub src: LanguageCode,
    pub tgt: LanguageCode,
}

impl TranslationDirection {
    pub fn new(src: LanguageCode, tgt: LanguageCode) -> Result<Self, CorpusError> {
        if src == tgt {
            return Err(CorpusError::SameLanguage(src));
        }
        Ok(TranslationDirection { src, tgt })
    }

    pub fn reversed(self) -> Self {
        TranslationDirection {
            src: self.tgt,
            tgt: self.src,
        }
    }

    pub fn unordered(self) -> LanguagePair {
        LanguagePair::new(self.src, self.tgt).expect("direction sides differ")
    }
}

impl fmt::Display for TranslationDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

impl fmt::Debug for TranslationDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for TranslationDirection {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (src, tgt) = s
            .split_once('-')
            .ok_or_else(|| CorpusError::InvalidPair(s.to_string()))?;
        TranslationDirection::new(src.parse()?, tgt.parse()?)
    }
}

/// An unordered language pair, stored with `first < second`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguagePair {
    first: LanguageCode,
    second: LanguageCode,
}

impl LanguagePair {
    pub fn new(a: LanguageCode, b: LanguageCode) -> Result<Self, CorpusError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(LanguagePair {
                first: a,
                second: b,
            }),
            std::cmp::Ordering::Greater => Ok(LanguagePair {
                first: b,
                second: a,
            }),
            std::cmp::Ordering::Equal => Err(CorpusError::SameLanguage(a)),
        }
    }

    pub fn first(&self) -> LanguageCode {
        self.first
    }

    pub fn second(&self) -> LanguageCode {
        self.second
    }

    pub fn contains(&self, lang: LanguageCode) -> bool {
        self.first == lang || self.second == lang
    }

    /// `first → second` and `second → first`.
    pub fn directions(&self) -> [TranslationDirection; 2] {
        [
            TranslationDirection {
                src: self.first,
                tgt: self.second,
            },
            TranslationDirection {
                src: self.second,
                tgt: self.first,
            },
        ]
    }
}

impl fmt::Display for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.first, self.second)
    }
}

impl fmt::Debug for LanguagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LanguagePair {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| CorpusError::InvalidPair(s.to_string()))?;
        LanguagePair::new(a.parse()?, b.parse()?)
    }
}

impl Serialize for LanguagePair {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LanguagePair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_languages() {
        let registry = LanguageRegistry::builtin();
        let codes: Vec<String> = registry
            .languages()
            .iter()
            .map(|l| l.to_string())
            .collect();
        assert_eq!(
            codes,
            ["bn", "en", "gu", "hi", "kn", "ml", "mr", "or", "pa", "ta", "te"]
        );
        assert_eq!(registry.pivot().as_str(), "en");
        assert_eq!(registry.non_pivot().len(), 10);
    }

    #[test]
    fn rejects_bad_codes() {
        assert!(matches!(
            LanguageCode::parse("EN"),
            Err(CorpusError::InvalidLanguageCode(_))
        ));
        assert!(matches!(
            LanguageCode::parse("eng"),
            Err(CorpusError::InvalidLanguageCode(_))
        ));
        assert!(matches!(
            LanguageCode::parse("zz"),
            Err(CorpusError::UnknownLanguage(_))
        ));
    }

    #[test]
    fn pair_is_canonical() {
        let a: LanguagePair = "hi-bn".parse().unwrap();
        let b: LanguagePair = "bn-hi".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "bn-hi");
        assert!("bn-bn".parse::<LanguagePair>().is_err());
    }

    #[test]
    fn directions_are_ordered() {
        let d: TranslationDirection = "bn-hi".parse().unwrap();
        assert_ne!(d, d.reversed());
        assert_eq!(d.reversed().to_string(), "hi-bn");
        assert_eq!(d.unordered(), d.reversed().unordered());
    }

    #[test]
    fn registry_from_toml() {
        let registry = LanguageRegistry::from_toml(
            "pivot = \"en\"\n[languages]\nen = \"latin\"\nne = \"devanagari\"\n",
        )
        .unwrap();
        let ne = registry.lookup("ne").unwrap();
        assert_eq!(ne.script(), Script::Devanagari);
        assert!(LanguageRegistry::from_toml("pivot = \"fr\"\n[languages]\nen = \"latin\"\n")
            .is_err());
    }
}
