//! Gazetteer construction from Wikidata and gazetteer-driven tooling for
//! BIO-tagged NER corpora: feature annotation, entity-replacement
//! augmentation, coverage and scoring.

pub mod augment;
pub mod corpus;
pub mod eval;
pub mod inflect;
pub mod matcher;
pub mod model;
pub mod normalize;
pub mod wikidata;

pub use model::*;
