use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::registry::{valid_code, TagRegistry};

/// Position part of a BIO label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BioKind {
    B,
    I,
    O,
}

impl BioKind {
    pub fn as_char(self) -> char {
        match self {
            BioKind::B => 'B',
            BioKind::I => 'I',
            BioKind::O => 'O',
        }
    }
}

/// A BIO label: `O`, `B-<code>` or `I-<code>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BioLabel {
    Outside,
    Begin(String),
    Inside(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("malformed BIO label `{0}`")]
    Malformed(String),
    #[error("BIO label `{text}` uses unknown tag `{code}`")]
    UnknownTag { text: String, code: String },
}

impl BioLabel {
    pub fn new(kind: BioKind, tag: &str) -> Self {
        match kind {
            BioKind::B => BioLabel::Begin(tag.to_string()),
            BioKind::I => BioLabel::Inside(tag.to_string()),
            BioKind::O => BioLabel::Outside,
        }
    }

    pub fn kind(&self) -> BioKind {
        match self {
            BioLabel::Outside => BioKind::O,
            BioLabel::Begin(_) => BioKind::B,
            BioLabel::Inside(_) => BioKind::I,
        }
    }

    pub fn tag(&self) -> Option<&str> {
        match self {
            BioLabel::Outside => None,
            BioLabel::Begin(t) | BioLabel::Inside(t) => Some(t),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, BioLabel::Outside)
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioLabel::Outside => f.write_str("O"),
            BioLabel::Begin(t) => write!(f, "B-{t}"),
            BioLabel::Inside(t) => write!(f, "I-{t}"),
        }
    }
}

impl FromStr for BioLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_bio_label(s, None)
    }
}

/// Parses a textual BIO label. When a registry is given, the tag code must
/// be registered in it.
pub fn parse_bio_label(text: &str, registry: Option<&TagRegistry>) -> Result<BioLabel, LabelError> {
    if text == "O" {
        return Ok(BioLabel::Outside);
    }
    let malformed = || LabelError::Malformed(text.to_string());
    let (kind, code) = match text.split_once('-') {
        Some(("B", code)) => (BioKind::B, code),
        Some(("I", code)) => (BioKind::I, code),
        _ => return Err(malformed()),
    };
    if !valid_code(code) {
        return Err(malformed());
    }
    if let Some(reg) = registry {
        if !reg.contains(code) {
            return Err(LabelError::UnknownTag {
                text: text.to_string(),
                code: code.to_string(),
            });
        }
    }
    Ok(BioLabel::new(kind, code))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationReason {
    /// `I-t` as the first label of the sequence.
    InsideAtStart,
    /// `I-t` directly after `O`.
    InsideAfterOutside,
    /// `I-t` directly after `B-u` or `I-u` with `u != t`.
    TypeMismatch,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationReason::InsideAtStart => "I- label at sequence start",
            ViolationReason::InsideAfterOutside => "I- label follows O",
            ViolationReason::TypeMismatch => "I- label continues an entity of another type",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BioViolation {
    pub index: usize,
    pub reason: ViolationReason,
}

/// Returns every position at which the sequence breaks the BIO scheme.
pub fn validate_bio_sequence(labels: &[BioLabel]) -> Vec<BioViolation> {
    let mut out = Vec::new();
    let mut prev: Option<&BioLabel> = None;
    for (index, label) in labels.iter().enumerate() {
        if let BioLabel::Inside(tag) = label {
            let reason = match prev {
                None => Some(ViolationReason::InsideAtStart),
                Some(BioLabel::Outside) => Some(ViolationReason::InsideAfterOutside),
                Some(p) if p.tag() != Some(tag.as_str()) => Some(ViolationReason::TypeMismatch),
                Some(_) => None,
            };
            if let Some(reason) = reason {
                out.push(BioViolation { index, reason });
            }
        }
        prev = Some(label);
    }
    out
}

pub fn is_bio_valid(labels: &[BioLabel]) -> bool {
    validate_bio_sequence(labels).is_empty()
}

/// A typed entity mention over tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntitySpan {
    pub start: usize,
    pub end: usize,
    pub tag: String,
}

/// Chunks a label sequence into entities. `B-t` always opens an entity;
/// `I-t` continues an open `t` entity and otherwise opens a new one, so
/// BIO-invalid input is read leniently the way conlleval does.
pub fn entity_spans(labels: &[BioLabel]) -> Vec<EntitySpan> {
    let mut out: Vec<EntitySpan> = Vec::new();
    let mut open = false;
    for (i, label) in labels.iter().enumerate() {
        match label {
            BioLabel::Outside => open = false,
            BioLabel::Begin(tag) => {
                out.push(EntitySpan { start: i, end: i + 1, tag: tag.clone() });
                open = true;
            }
            BioLabel::Inside(tag) => match out.last_mut() {
                Some(last) if open && last.end == i && last.tag == *tag => last.end = i + 1,
                _ => {
                    out.push(EntitySpan { start: i, end: i + 1, tag: tag.clone() });
                    open = true;
                }
            },
        }
    }
    out
}
