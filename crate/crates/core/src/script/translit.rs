use unicode_general_category::{get_general_category, GeneralCategory};

use super::ScriptError;
use crate::corpus::{LanguageCode, Script};

/// Last block offset whose letters line up across the Brahmic blocks.
/// Offsets 0x70..=0x7F hold script-specific signs and are never mapped.
pub const COORDINATED_RANGE_END: u32 = 0x6F;

/// Devanagari danda and double danda: shared by all Indic scripts and never
/// moved between blocks.
pub const SHARED_PUNCTUATION: [char; 2] = ['\u{0964}', '\u{0965}'];

const DEVANAGARI_BASE: u32 = 0x0900;

/// What [`from_devanagari_with`] does with a Devanagari letter that has no
/// counterpart in the target script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnmappablePolicy {
    #[default]
    Error,
    PassThrough,
}

/// A Devanagari letter whose position is unassigned in the target block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoCounterpart(pub char);

pub fn is_assigned(c: char) -> bool {
    get_general_category(c) != GeneralCategory::Unassigned
}

/// Positional mapping between one Brahmic block and Devanagari.
///
/// A codepoint maps when its block offset is in the coordinated range, it is
/// not shared punctuation, and both it and its counterpart are assigned.
/// That makes the mapping injective and exactly invertible on its image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptMap {
    script: Script,
    base: u32,
}

impl ScriptMap {
    pub fn for_language(lang: LanguageCode) -> Result<Self, ScriptError> {
        let script = lang.script();
        let base = script
            .block_base()
            .ok_or(ScriptError::UnsupportedLanguage(lang))?;
        Ok(ScriptMap { script, base })
    }

    pub fn script(&self) -> Script {
        self.script
    }

    /// Signed distance from this block to the Devanagari block.
    pub fn offset(&self) -> i64 {
        i64::from(self.base) - i64::from(DEVANAGARI_BASE)
    }

    fn counterpart(c: char, from_base: u32, to_base: u32) -> Option<char> {
        let cp = u32::from(c);
        if !(from_base..from_base + 0x80).contains(&cp) || SHARED_PUNCTUATION.contains(&c) {
            return None;
        }
        let offset = cp - from_base;
        if offset > COORDINATED_RANGE_END || !is_assigned(c) {
            return None;
        }
        char::from_u32(to_base + offset).filter(|t| is_assigned(*t))
    }

    /// Native codepoint → Devanagari, `None` when it stays as is.
    pub fn to_devanagari(&self, c: char) -> Option<char> {
        ScriptMap::counterpart(c, self.base, DEVANAGARI_BASE)
    }

    /// Devanagari codepoint → native. `Err` for a Devanagari letter with no
    /// native counterpart, `Ok(None)` for anything outside the block.
    pub fn from_devanagari(&self, c: char) -> Result<Option<char>, NoCounterpart> {
        let cp = u32::from(c);
        let in_block = (DEVANAGARI_BASE..DEVANAGARI_BASE + 0x80).contains(&cp);
        if !in_block || SHARED_PUNCTUATION.contains(&c) || !is_assigned(c) {
            return Ok(None);
        }
        if self.base == DEVANAGARI_BASE {
            return Ok(Some(c));
        }
        ScriptMap::counterpart(c, DEVANAGARI_BASE, self.base)
            .map(Some)
            .ok_or(NoCounterpart(c))
    }
}

/// Maps `lang`'s native block into Devanagari; digits, punctuation, Latin and
/// anything else outside the block pass through.
pub fn to_devanagari(text: &str, lang: LanguageCode) -> Result<String, ScriptError> {
    let map = ScriptMap::for_language(lang)?;
    if map.base == DEVANAGARI_BASE {
        return Ok(text.to_string());
    }
    Ok(text
        .chars()
        .map(|c| map.to_devanagari(c).unwrap_or(c))
        .collect())
}

pub fn from_devanagari(text: &str, lang: LanguageCode) -> Result<String, ScriptError> {
    from_devanagari_with(text, lang, UnmappablePolicy::Error)
}

pub fn from_devanagari_with(
    text: &str,
    lang: LanguageCode,
    policy: UnmappablePolicy,
) -> Result<String, ScriptError> {
    let map = ScriptMap::for_language(lang)?;
    let mut out = String::with_capacity(text.len());
    for (position, c) in text.chars().enumerate() {
        match map.from_devanagari(c) {
            Ok(Some(mapped)) => out.push(mapped),
            Ok(None) => out.push(c),
            Err(NoCounterpart(_)) => match policy {
                UnmappablePolicy::PassThrough => out.push(c),
                UnmappablePolicy::Error => {
                    return Err(ScriptError::UnmappableCodepoint {
                        codepoint: u32::from(c),
                        position,
                        lang,
                    })
                }
            },
        }
    }
    Ok(out)
}
