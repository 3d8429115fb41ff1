//! Training-data augmentation by entity replacement.
//!
//! Every entity of a targeted type is swapped for an entry drawn uniformly
//! from the same-type gazetteer. The random stream comes from ChaCha8
//! seeded with `seed_from_u64(seed)`. Entities are visited in document
//! order; for each one that needs a fresh decision the generator yields, in
//! this order, a Bernoulli draw (only when the probability is below 1) and
//! an index drawn from `0..pool_len` as a `u64`, so results do not depend
//! on the platform word size.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Document;
use crate::model::{
    entity_spans, validate_bio_sequence, BioLabel, BioViolation, EntitySpan, Gazetteer, Language, Sentence, Source,
    Token, TokenMode,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedEntity {
    pub span: EntitySpan,
    pub surface: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("gold labels break the BIO scheme at token {}", .0.first().map_or(0, |v| v.index))]
pub struct BioError(pub Vec<BioViolation>);

#[derive(Debug, Error, PartialEq)]
pub enum AugmentError {
    #[error("sentence {sentence}: {source}")]
    Bio {
        sentence: usize,
        #[source]
        source: BioError,
    },
    #[error("no {language} gazetteer entries for targeted type {tag}")]
    EmptyGroup { tag: String, language: Language },
    #[error("replacement probability {0} is outside [0, 1]")]
    Probability(f64),
}

/// Entities of a BIO-valid sentence, left to right.
pub fn extract_entities(sentence: &Sentence) -> Result<Vec<ExtractedEntity>, BioError> {
    let labels = sentence.gold_labels();
    let violations = validate_bio_sequence(&labels);
    if !violations.is_empty() {
        return Err(BioError(violations));
    }
    Ok(entity_spans(&labels)
        .into_iter()
        .map(|span| ExtractedEntity {
            surface: sentence.join_range(span.start, span.end),
            span,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeSelection {
    All,
    Only(BTreeSet<String>),
}

impl TypeSelection {
    pub fn contains(&self, tag: &str) -> bool {
        match self {
            TypeSelection::All => true,
            TypeSelection::Only(set) => set.contains(tag),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AugmentConfig {
    pub types: TypeSelection,
    /// Replace every occurrence of a surface string with the same entry.
    pub consistent: bool,
    pub seed: u64,
    /// Chance that an entity is replaced at all.
    pub probability: f64,
    pub language: Language,
    pub sources: Vec<Source>,
}

impl AugmentConfig {
    pub fn new(language: Language, seed: u64) -> Self {
        Self {
            types: TypeSelection::All,
            consistent: false,
            seed,
            probability: 1.0,
            language,
            sources: Source::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentOutcome {
    pub document: Document,
    pub replaced: usize,
    pub kept: usize,
}

fn replacement_tokens(entry: &[String], mode: TokenMode) -> Vec<String> {
    match mode {
        TokenMode::Word => entry.to_vec(),
        TokenMode::Character => entry
            .iter()
            .flat_map(|t| t.chars())
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect(),
    }
}

/// Replaces targeted entities with random same-type gazetteer entries.
/// All checks run before any replacement is made.
pub fn augment_document(
    doc: &Document,
    gazetteer: &Gazetteer,
    config: &AugmentConfig,
) -> Result<AugmentOutcome, AugmentError> {
    if !(0.0..=1.0).contains(&config.probability) {
        return Err(AugmentError::Probability(config.probability));
    }
    let mut entities = Vec::with_capacity(doc.sentences.len());
    for (i, s) in doc.sentences.iter().enumerate() {
        entities.push(extract_entities(s).map_err(|source| AugmentError::Bio { sentence: i, source })?);
    }

    let mut pools: HashMap<&str, Vec<&Vec<String>>> = HashMap::new();
    for e in entities.iter().flatten() {
        let tag = e.span.tag.as_str();
        if !config.types.contains(tag) || pools.contains_key(tag) {
            continue;
        }
        let pool = gazetteer.union(config.language, tag, &config.sources);
        if pool.is_empty() {
            return Err(AugmentError::EmptyGroup {
                tag: tag.to_string(),
                language: config.language,
            });
        }
        pools.insert(tag, pool);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // (tag, surface) -> chosen entry, or None when the entity is kept.
    let mut memo: HashMap<(&str, &str), Option<&Vec<String>>> = HashMap::new();
    let (mut replaced, mut kept) = (0, 0);
    let mut sentences = Vec::with_capacity(doc.sentences.len());

    for (sentence, found) in doc.sentences.iter().zip(&entities) {
        let mut tokens: Vec<Token> = Vec::with_capacity(sentence.len());
        let mut cursor = 0;
        for e in found {
            let Some(pool) = pools.get(e.span.tag.as_str()) else {
                continue;
            };
            let mut draw = || {
                if config.probability < 1.0 && !rng.random_bool(config.probability) {
                    None
                } else {
                    Some(pool[rng.random_range(0..pool.len() as u64) as usize])
                }
            };
            let choice = if config.consistent {
                *memo.entry((e.span.tag.as_str(), e.surface.as_str())).or_insert_with(draw)
            } else {
                draw()
            };
            let Some(entry) = choice else {
                kept += 1;
                continue;
            };
            replaced += 1;
            tokens.extend_from_slice(&sentence.tokens[cursor..e.span.start]);
            for (k, surface) in replacement_tokens(entry, sentence.mode).into_iter().enumerate() {
                let label = if k == 0 {
                    BioLabel::Begin(e.span.tag.clone())
                } else {
                    BioLabel::Inside(e.span.tag.clone())
                };
                tokens.push(Token::new(surface, label));
            }
            cursor = e.span.end;
        }
        tokens.extend_from_slice(&sentence.tokens[cursor..]);
        sentences.push(Sentence {
            tokens,
            mode: sentence.mode,
        });
    }

    Ok(AugmentOutcome {
        document: Document::new(doc.source.clone(), sentences),
        replaced,
        kept,
    })
}
