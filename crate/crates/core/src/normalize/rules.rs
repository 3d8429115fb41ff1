use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use regex::Regex;
use serde::Deserialize;
use thiserror::Error;

const SHIPPED: &str = include_str!("../../data/filter_rules.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PunctuationPolicy {
    Keep,
    /// Strip leading and trailing punctuation, keeping a final `.` that
    /// closes an abbreviation.
    #[default]
    TrimEdges,
    RemoveAll,
}

#[derive(Debug, Error)]
pub enum RuleSetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid rule file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("rules for {scope}: pattern `{pattern}`: {source}")]
    Pattern {
        scope: String,
        pattern: String,
        #[source]
        source: regex::Error,
    },
    #[error("rules for {scope}: {what} minimum {min} exceeds maximum {max}")]
    Bounds {
        scope: String,
        what: &'static str,
        min: usize,
        max: usize,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRules {
    reject: Option<Vec<String>>,
    min_tokens: Option<usize>,
    max_tokens: Option<usize>,
    min_chars: Option<usize>,
    max_chars: Option<usize>,
    strip_parenthetical: Option<bool>,
    punctuation: Option<PunctuationPolicy>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRuleSet {
    #[serde(default)]
    default: RawRules,
    #[serde(default)]
    types: BTreeMap<String, RawRules>,
}

/// Filters for one type.
#[derive(Debug, Clone)]
pub struct FilterRules {
    pub reject: Vec<Regex>,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub min_chars: usize,
    pub max_chars: usize,
    pub strip_parenthetical: bool,
    pub punctuation: PunctuationPolicy,
}

impl Default for FilterRules {
    fn default() -> Self {
        Self {
            reject: Vec::new(),
            min_tokens: 1,
            max_tokens: 10,
            min_chars: 2,
            max_chars: 60,
            strip_parenthetical: true,
            punctuation: PunctuationPolicy::TrimEdges,
        }
    }
}

impl FilterRules {
    fn overlay(&self, raw: &RawRules, scope: &str) -> Result<Self, RuleSetError> {
        let mut reject = self.reject.clone();
        for p in raw.reject.iter().flatten() {
            reject.push(Regex::new(p).map_err(|source| RuleSetError::Pattern {
                scope: scope.to_string(),
                pattern: p.clone(),
                source,
            })?);
        }
        let out = Self {
            reject,
            min_tokens: raw.min_tokens.unwrap_or(self.min_tokens),
            max_tokens: raw.max_tokens.unwrap_or(self.max_tokens),
            min_chars: raw.min_chars.unwrap_or(self.min_chars),
            max_chars: raw.max_chars.unwrap_or(self.max_chars),
            strip_parenthetical: raw.strip_parenthetical.unwrap_or(self.strip_parenthetical),
            punctuation: raw.punctuation.unwrap_or(self.punctuation),
        };
        for (what, min, max) in [
            ("token", out.min_tokens, out.max_tokens),
            ("character", out.min_chars, out.max_chars),
        ] {
            if min > max {
                return Err(RuleSetError::Bounds {
                    scope: scope.to_string(),
                    what,
                    min,
                    max,
                });
            }
        }
        Ok(out)
    }

    pub fn with_patterns(mut self, patterns: &[&str]) -> Result<Self, regex::Error> {
        for p in patterns {
            self.reject.push(Regex::new(p)?);
        }
        Ok(self)
    }
}

/// Per-type filters with a fallback for types without their own table.
#[derive(Debug, Clone, Default)]
pub struct FilterRuleSet {
    default: FilterRules,
    types: BTreeMap<String, FilterRules>,
}

impl FilterRuleSet {
    pub fn new(default: FilterRules) -> Self {
        Self {
            default,
            types: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, tag: &str, rules: FilterRules) {
        self.types.insert(tag.to_string(), rules);
    }

    pub fn from_toml_str(text: &str) -> Result<Self, RuleSetError> {
        let raw: RawRuleSet = toml::from_str(text)?;
        let default = FilterRules::default().overlay(&raw.default, "default")?;
        let mut types = BTreeMap::new();
        for (tag, r) in &raw.types {
            types.insert(tag.clone(), default.overlay(r, tag)?);
        }
        Ok(Self { default, types })
    }

    pub fn read_file(path: &Path) -> Result<Self, RuleSetError> {
        let text = fs::read_to_string(path).map_err(|source| RuleSetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// The rule file bundled with the crate.
    pub fn shipped() -> Self {
        Self::from_toml_str(SHIPPED).expect("bundled rule file is valid")
    }

    pub fn for_type(&self, tag: &str) -> &FilterRules {
        self.types.get(tag).unwrap_or(&self.default)
    }
}
