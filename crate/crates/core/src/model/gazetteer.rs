use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Two-letter lowercase ISO 639-1 language code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Language([u8; 2]);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("`{0}` is not a two-letter lowercase language code")]
pub struct LanguageError(pub String);

impl Language {
    pub fn new(code: &str) -> Result<Self, LanguageError> {
        match code.as_bytes() {
            [a, b] if a.is_ascii_lowercase() && b.is_ascii_lowercase() => Ok(Self([*a, *b])),
            _ => Err(LanguageError(code.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("ascii")
    }
}

impl FromStr for Language {
    type Err = LanguageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Language::new(s)
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which name list an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Canonical,
    Alias,
    Inflected,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Canonical, Source::Alias, Source::Inflected];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Canonical => "canonical",
            Source::Alias => "alias",
            Source::Inflected => "inflected",
        }
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical" => Ok(Source::Canonical),
            "alias" => Ok(Source::Alias),
            "inflected" => Ok(Source::Inflected),
            other => Err(format!("unknown gazetteer source `{other}`")),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed entity name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GazetteerEntry {
    pub tokens: Vec<String>,
    pub tag: String,
    pub source: Source,
    pub language: Language,
}

impl GazetteerEntry {
    pub fn new(tokens: Vec<String>, tag: &str, source: Source, language: Language) -> Self {
        debug_assert!(!tokens.is_empty());
        Self {
            tokens,
            tag: tag.to_string(),
            source,
            language,
        }
    }

    /// Splits `name` on whitespace.
    pub fn from_name(name: &str, tag: &str, source: Source, language: Language) -> Self {
        Self::new(split_name(name), tag, source, language)
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn key(&self) -> GroupKey {
        GroupKey {
            language: self.language,
            tag: self.tag.clone(),
            source: self.source,
        }
    }
}

pub fn split_name(name: &str) -> Vec<String> {
    name.split_whitespace().map(str::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupKey {
    pub language: Language,
    pub tag: String,
    pub source: Source,
}

impl GroupKey {
    pub fn new(language: Language, tag: &str, source: Source) -> Self {
        Self {
            language,
            tag: tag.to_string(),
            source,
        }
    }

    /// File name `<lang>_<TAG>_<source>.txt`.
    pub fn file_name(&self) -> String {
        format!("{}_{}_{}.txt", self.language, self.tag, self.source)
    }

    /// Inverse of [`GroupKey::file_name`]. Tag codes may contain underscores,
    /// so the language is the first field and the source the last.
    pub fn from_file_name(name: &str) -> Option<Self> {
        let stem = name.strip_suffix(".txt")?;
        let (lang, rest) = stem.split_once('_')?;
        let (tag, source) = rest.rsplit_once('_')?;
        if tag.is_empty() {
            return None;
        }
        Some(Self {
            language: lang.parse().ok()?,
            tag: tag.to_string(),
            source: source.parse().ok()?,
        })
    }
}

/// Entries grouped by (language, type, source). Groups are sets, so token
/// sequences are unique per group and iterate in sorted order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gazetteer {
    groups: BTreeMap<GroupKey, BTreeSet<Vec<String>>>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entry; returns false when the group already held it.
    pub fn insert(&mut self, entry: GazetteerEntry) -> bool {
        let key = entry.key();
        self.insert_tokens(key, entry.tokens)
    }

    pub fn insert_tokens(&mut self, key: GroupKey, tokens: Vec<String>) -> bool {
        if tokens.is_empty() {
            return false;
        }
        self.groups.entry(key).or_default().insert(tokens)
    }

    /// Registers a group without entries so that it shows up in listings.
    pub fn ensure_group(&mut self, key: GroupKey) {
        self.groups.entry(key).or_default();
    }

    pub fn group(&self, key: &GroupKey) -> Option<&BTreeSet<Vec<String>>> {
        self.groups.get(key)
    }

    pub fn groups(&self) -> impl Iterator<Item = (&GroupKey, &BTreeSet<Vec<String>>)> {
        self.groups.iter()
    }

    pub fn group_sizes(&self) -> BTreeMap<GroupKey, usize> {
        self.groups.iter().map(|(k, v)| (k.clone(), v.len())).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = GazetteerEntry> + '_ {
        self.groups.iter().flat_map(|(k, set)| {
            set.iter().map(move |tokens| GazetteerEntry {
                tokens: tokens.clone(),
                tag: k.tag.clone(),
                source: k.source,
                language: k.language,
            })
        })
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, key: &GroupKey, tokens: &[String]) -> bool {
        self.groups.get(key).is_some_and(|g| g.contains(tokens))
    }

    pub fn languages(&self) -> BTreeSet<Language> {
        self.groups.keys().map(|k| k.language).collect()
    }

    pub fn tags(&self) -> BTreeSet<&str> {
        self.groups.keys().map(|k| k.tag.as_str()).collect()
    }

    /// Sorted, deduplicated union of the selected sources for one
    /// (language, type).
    pub fn union(&self, language: Language, tag: &str, sources: &[Source]) -> Vec<&Vec<String>> {
        let mut out: Vec<&Vec<String>> = sources
            .iter()
            .filter_map(|&s| self.groups.get(&GroupKey::new(language, tag, s)))
            .flatten()
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn merge(&mut self, other: Gazetteer) {
        for (k, set) in other.groups {
            self.groups.entry(k).or_default().extend(set);
        }
    }
}
