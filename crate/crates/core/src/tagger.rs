//! Source/target language control tokens.
//!
//! Tag grammar: `^__(src|tgt)_([a-z]{2})__$`. A tagged sequence is
//! `[__src_xx__, __tgt_yy__, payload...]`, placed on the encoder side.

use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::corpus::{LanguageCode, TranslationDirection};

pub const TAG_PATTERN: &str = r"^__(src|tgt)_([a-z]{2})__$";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TagError {
    #[error("payload token {index} ({token:?}) is a reserved language tag")]
    ReservedTokenInPayload { index: usize, token: String },
    #[error("malformed tags: {0}")]
    MalformedTags(String),
    #[error("source and target tag are both {0}")]
    SameLanguage(LanguageCode),
}

fn tag_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(TAG_PATTERN).unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagSide {
    Src,
    Tgt,
}

/// Returns the side and code if `token` is a tag token.
pub fn parse_tag(token: &str) -> Option<(TagSide, &str)> {
    let caps = tag_regex().captures(token)?;
    let side = match &caps[1] {
        "src" => TagSide::Src,
        _ => TagSide::Tgt,
    };
    Some((side, caps.get(2).unwrap().as_str()))
}

pub fn is_tag(token: &str) -> bool {
    tag_regex().is_match(token)
}

pub fn src_tag(lang: LanguageCode) -> String {
    format!("__src_{lang}__")
}

pub fn tgt_tag(lang: LanguageCode) -> String {
    format!("__tgt_{lang}__")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedSequence {
    pub direction: TranslationDirection,
    pub payload: Vec<String>,
}

impl TaggedSequence {
    pub fn to_tokens(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.payload.len() + 2);
        out.push(src_tag(self.direction.src));
        out.push(tgt_tag(self.direction.tgt));
        out.extend(self.payload.iter().cloned());
        out
    }
}

pub fn tag<S: AsRef<str>>(
    tokens: &[S],
    src: LanguageCode,
    tgt: LanguageCode,
) -> Result<Vec<String>, TagError> {
    if src == tgt {
        return Err(TagError::SameLanguage(src));
    }
    if let Some((index, token)) = tokens
        .iter()
        .enumerate()
        .find(|(_, t)| is_tag(t.as_ref()))
    {
        return Err(TagError::ReservedTokenInPayload {
            index,
            token: token.as_ref().to_string(),
        });
    }
    let mut out = Vec::with_capacity(tokens.len() + 2);
    out.push(src_tag(src));
    out.push(tgt_tag(tgt));
    out.extend(tokens.iter().map(|t| t.as_ref().to_string()));
    Ok(out)
}

/// Tags a whitespace-tokenized line.
pub fn tag_line(line: &str, src: LanguageCode, tgt: LanguageCode) -> Result<String, TagError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    Ok(tag(&tokens, src, tgt)?.join(" "))
}

pub fn untag<S: AsRef<str>>(tokens: &[S]) -> Result<TaggedSequence, TagError> {
    let [first, second, rest @ ..] = tokens else {
        return Err(TagError::MalformedTags(format!(
            "expected at least two tokens, got {}",
            tokens.len()
        )));
    };
    let lang = |token: &str, want: TagSide| -> Result<LanguageCode, TagError> {
        match parse_tag(token) {
            Some((side, code)) if side == want => code
                .parse()
                .map_err(|e| TagError::MalformedTags(format!("{token}: {e}"))),
            _ => Err(TagError::MalformedTags(format!(
                "expected a {} tag, found {token:?}",
                if want == TagSide::Src { "source" } else { "target" }
            ))),
        }
    };
    let src = lang(first.as_ref(), TagSide::Src)?;
    let tgt = lang(second.as_ref(), TagSide::Tgt)?;
    let direction = TranslationDirection::new(src, tgt).map_err(|_| TagError::SameLanguage(src))?;
    if let Some(t) = rest.iter().find(|t| is_tag(t.as_ref())) {
        return Err(TagError::MalformedTags(format!(
            "tag {:?} inside payload",
            t.as_ref()
        )));
    }
    Ok(TaggedSequence {
        direction,
        payload: rest.iter().map(|t| t.as_ref().to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(c: &str) -> LanguageCode {
        c.parse().unwrap()
    }

    #[test]
    fn tags_prefix_payload() {
        assert_eq!(
            tag(&["hello"], l("en"), l("hi")).unwrap(),
            ["__src_en__", "__tgt_hi__", "hello"]
        );
        assert_eq!(tag::<&str>(&[], l("en"), l("hi")).unwrap().len(), 2);
    }

    #[test]
    fn reserved_payload_rejected() {
        let err = tag(&["a", "__tgt_hi__"], l("en"), l("hi")).unwrap_err();
        assert!(matches!(err, TagError::ReservedTokenInPayload { index: 1, .. }));
    }

    #[test]
    fn untag_inverts_tag() {
        for payload in [vec!["hello"], vec![], vec!["a", "b", "__x__"]] {
            let tagged = tag(&payload, l("bn"), l("ta")).unwrap();
            let seq = untag(&tagged).unwrap();
            assert_eq!(seq.direction.to_string(), "bn-ta");
            assert_eq!(seq.payload, payload);
            assert_eq!(seq.to_tokens(), tagged);
        }
    }

    #[test]
    fn untag_rejects_bad_order() {
        assert!(untag(&["__tgt_hi__", "__src_en__"]).is_err());
        assert!(untag(&["__src_en__"]).is_err());
        assert!(untag(&["__src_en__", "__tgt_en__"]).is_err());
        assert!(untag(&["__src_en__", "__tgt_zz__"]).is_err());
    }

    #[test]
    fn grammar() {
        assert!(is_tag("__src_hi__"));
        assert!(!is_tag("__src_hin__"));
        assert!(!is_tag("__SRC_hi__"));
        assert!(!is_tag("x__src_hi__"));
    }
}
