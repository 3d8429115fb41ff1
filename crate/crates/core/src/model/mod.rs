//! Shared domain vocabulary: tag types, BIO labels, tokens, sentences and
//! gazetteer entries.

mod gazetteer;
mod label;
mod registry;
mod sentence;

pub use gazetteer::{split_name, Gazetteer, GazetteerEntry, GroupKey, Language, LanguageError, Source};
pub use label::{
    entity_spans, is_bio_valid, parse_bio_label, validate_bio_sequence, BioKind, BioLabel, BioViolation, EntitySpan, LabelError,
    ViolationReason,
};
pub use registry::{RegistryError, TagRegistry, TagType};
pub use sentence::{check_surface, Sentence, Token, TokenError, TokenMode};
