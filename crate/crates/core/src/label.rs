//! Canonical action labels.
//!
//! A label is a non-empty sequence of components, each a word or an integer.
//! `readSign[3]` and `c[1]:full.moveto[2]` canonicalize to `readSign.3` and
//! `c.1.full.moveto.2`. Labels order component-wise: integers compare
//! numerically and sort before words, words compare bytewise.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelPart {
    Num(i64),
    Word(String),
}

impl fmt::Display for LabelPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelPart::Num(n) => write!(f, "{n}"),
            LabelPart::Word(w) => f.write_str(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Vec<LabelPart>);

impl Label {
    pub fn new(parts: Vec<LabelPart>) -> Self {
        debug_assert!(!parts.is_empty());
        Label(parts)
    }

    pub fn word(w: impl Into<String>) -> Self {
        Label(vec![LabelPart::Word(w.into())])
    }

    pub fn parts(&self) -> &[LabelPart] {
        &self.0
    }

    /// `prefix.self`
    pub fn prefixed(&self, prefix: &Label) -> Label {
        let mut parts = prefix.0.clone();
        parts.extend(self.0.iter().cloned());
        Label(parts)
    }

    pub fn starts_with(&self, prefix: &Label) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Replaces a leading `old` with `new`; `None` if `old` is not a prefix.
    pub fn replace_prefix(&self, old: &Label, new: &Label) -> Option<Label> {
        if !self.starts_with(old) {
            return None;
        }
        let mut parts = new.0.clone();
        parts.extend(self.0[old.0.len()..].iter().cloned());
        Some(Label(parts))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed canonical label `{0}`")]
pub struct LabelParseError(pub String);

impl FromStr for Label {
    type Err = LabelParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || LabelParseError(s.to_string());
        if s.is_empty() {
            return Err(err());
        }
        let mut parts = Vec::new();
        for piece in s.split('.') {
            let first = piece.chars().next().ok_or_else(err)?;
            if first.is_ascii_digit() || first == '-' {
                parts.push(LabelPart::Num(piece.parse().map_err(|_| err())?));
            } else if first.is_ascii_lowercase()
                && piece.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                parts.push(LabelPart::Word(piece.to_string()));
            } else {
                return Err(err());
            }
        }
        Ok(Label(parts))
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
