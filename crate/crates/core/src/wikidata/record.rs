use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::{Language, Source};

/// A Wikidata item id such as `Q207694`. Orders numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qid(pub u64);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{0}` is not a Wikidata item id")]
pub struct QidError(pub String);

impl FromStr for Qid {
    type Err = QidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s.strip_prefix('Q').ok_or_else(|| QidError(s.to_string()))?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || (digits.len() > 1 && digits.starts_with('0'))
        {
            return Err(QidError(s.to_string()));
        }
        digits.parse().map(Qid).map_err(|_| QidError(s.to_string()))
    }
}

impl Qid {
    /// Accepts either a bare id or an entity URI ending in one.
    pub fn from_uri(s: &str) -> Result<Self, QidError> {
        s.rsplit('/').next().unwrap_or(s).parse()
    }
}

impl fmt::Display for Qid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}", self.0)
    }
}

impl Serialize for Qid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Qid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Whether a name is the item's label or one of its aliases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Canonical,
    Alias,
}

impl LabelKind {
    pub fn source(self) -> Source {
        match self {
            LabelKind::Canonical => Source::Canonical,
            LabelKind::Alias => Source::Alias,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawNameRecord {
    pub entity: Qid,
    pub kind: LabelKind,
    pub text: String,
    pub language: Language,
}
