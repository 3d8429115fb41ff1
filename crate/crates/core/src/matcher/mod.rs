//! Gazetteer matching: full matches with longest-first selection, partial
//! matches that copy the entry-internal BIO tags, and the per-type feature
//! layers and one-hot encoding built from them.
//!
//! Selection rules, applied per type:
//!
//! * Full match: a sentence n-gram equal to a complete entry. Candidates are
//!   taken longest first, then by smaller start, skipping any that overlap
//!   an already selected span.
//! * Partial match: a sentence n-gram equal to `entry[offset..offset + n]`
//!   that is not a complete entry and cannot be extended left or right
//!   within that same entry occurrence. Minimum length is 2, or 1 for the
//!   types in [`PartialPolicy::single_token_tags`] (PER by default).
//!   Candidates are taken longest first, then by smaller start, then
//!   offset-0 occurrences first; the copied tags are `B, I, …` for an
//!   offset-0 occurrence and `I, I, …` otherwise.
//! * In [`annotate`], full matches win: partial candidates touching a token
//!   covered by a full match of the same type are discarded before partial
//!   selection. Character-mode sentences never get partial matches.

mod index;

use std::collections::BTreeSet;

use rayon::prelude::*;

pub use index::{CasePolicy, IndexStats, MatchIndex};

use crate::corpus::{Document, FeatureColumns};
use crate::model::{BioKind, BioLabel, Gazetteer, Language, Sentence, Source, TagRegistry, TokenMode};
use index::OccurrenceTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchKind {
    Full,
    Partial,
}

/// A selected match over tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchSpan {
    pub start: usize,
    pub end: usize,
    pub tag: String,
    pub kind: MatchKind,
    /// BIO kinds copied onto the covered tokens.
    pub tags: Vec<BioKind>,
}

impl MatchSpan {
    fn new(start: usize, len: usize, tag: &str, kind: MatchKind, first: BioKind) -> Self {
        let mut tags = vec![BioKind::I; len];
        tags[0] = first;
        Self {
            start,
            end: start + len,
            tag: tag.to_string(),
            kind,
            tags,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Which types accept single-token partial matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialPolicy {
    pub single_token_tags: BTreeSet<String>,
}

impl Default for PartialPolicy {
    fn default() -> Self {
        Self {
            single_token_tags: BTreeSet::from(["PER".to_string()]),
        }
    }
}

impl PartialPolicy {
    pub fn min_len(&self, tag: &str) -> usize {
        if self.single_token_tags.contains(tag) {
            1
        } else {
            2
        }
    }
}

/// Greedy non-overlapping selection over candidates already in priority
/// order.
fn select<I>(len: usize, candidates: I, covered: &mut [bool]) -> Vec<(usize, usize, BioKind)>
where
    I: IntoIterator<Item = (usize, usize, BioKind)>,
{
    let mut chosen = Vec::new();
    for (s, n, first) in candidates {
        debug_assert!(s + n <= len);
        if covered[s..s + n].iter().any(|&c| c) {
            continue;
        }
        covered[s..s + n].iter_mut().for_each(|c| *c = true);
        chosen.push((s, n, first));
    }
    chosen.sort_unstable_by_key(|&(s, _, _)| s);
    chosen
}

fn full_spans(table: &OccurrenceTable, len: usize, tag: &str) -> Vec<MatchSpan> {
    let mut covered = vec![false; len];
    let candidates = (1..=table.max_n().min(len))
        .rev()
        .flat_map(|n| (0..=len - n).map(move |s| (s, n)))
        .filter(|&(s, n)| table.is_full(s, n))
        .map(|(s, n)| (s, n, BioKind::B));
    select(len, candidates, &mut covered)
        .into_iter()
        .map(|(s, n, first)| MatchSpan::new(s, n, tag, MatchKind::Full, first))
        .collect()
}

/// Partial spans avoiding `blocked` tokens.
fn partial_spans(table: &OccurrenceTable, len: usize, tag: &str, min_len: usize, blocked: &[bool]) -> Vec<MatchSpan> {
    let full = |s: usize, n: usize| u32::from(table.is_full(s, n));
    // Occurrences of (s, n) that are maximal and not a complete entry:
    // those not extendable to the right, minus those extendable to the
    // left (which are the right-maximal occurrences of (s - 1, n + 1)),
    // minus the complete-entry occurrence.
    let maximal = |s: usize, n: usize| -> u32 {
        let right_maximal = table.occurrences(s, n) - table.occurrences(s, n + 1);
        let left_extendable = if s > 0 {
            table.occurrences(s - 1, n + 1) - table.occurrences(s - 1, n + 2)
        } else {
            0
        };
        right_maximal - left_extendable - full(s, n)
    };
    // Offset-0 occurrences of that kind: entries with the n-gram as prefix
    // that do not continue with the next sentence token.
    let at_entry_start = |s: usize, n: usize| table.prefixed(s, n) - table.prefixed(s, n + 1) - full(s, n);

    let mut covered = blocked.to_vec();
    let max_n = table.max_n().min(len);
    if max_n < min_len {
        return Vec::new();
    }
    let candidates = (min_len..=max_n)
        .rev()
        .flat_map(|n| (0..=len - n).map(move |s| (s, n)))
        .filter(|&(s, n)| maximal(s, n) > 0)
        .map(|(s, n)| {
            let first = if at_entry_start(s, n) > 0 { BioKind::B } else { BioKind::I };
            (s, n, first)
        });
    select(len, candidates, &mut covered)
        .into_iter()
        .map(|(s, n, first)| MatchSpan::new(s, n, tag, MatchKind::Partial, first))
        .collect()
}

/// Non-overlapping full matches of the index's entries in the sentence,
/// sorted by start.
///
/// # Panics
/// If the sentence mode differs from the index mode.
pub fn find_full_matches(sentence: &Sentence, index: &MatchIndex) -> Vec<MatchSpan> {
    let ids = index.encode_sentence(sentence);
    let table = index.occurrence_table(&ids);
    full_spans(&table, sentence.len(), index.tag())
}

/// Non-overlapping partial matches, sorted by start. Always empty in
/// character mode.
///
/// # Panics
/// If the sentence mode differs from the index mode.
pub fn find_partial_matches(sentence: &Sentence, index: &MatchIndex, policy: &PartialPolicy) -> Vec<MatchSpan> {
    if index.mode() == TokenMode::Character {
        return Vec::new();
    }
    let ids = index.encode_sentence(sentence);
    let table = index.occurrence_table(&ids);
    let blocked = vec![false; sentence.len()];
    partial_spans(&table, sentence.len(), index.tag(), policy.min_len(index.tag()), &blocked)
}

/// One BIO row per type over a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureLayers {
    tags: Vec<String>,
    rows: Vec<Vec<BioKind>>,
}

impl FeatureLayers {
    pub fn new(tags: Vec<String>, rows: Vec<Vec<BioKind>>) -> Self {
        assert_eq!(tags.len(), rows.len());
        Self { tags, rows }
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn row(&self, tag_index: usize) -> &[BioKind] {
        &self.rows[tag_index]
    }

    pub fn row_for(&self, tag: &str) -> Option<&[BioKind]> {
        self.tags.iter().position(|t| t == tag).map(|i| self.rows[i].as_slice())
    }

    /// The row rendered as labels (`B-<tag>`, `I-<tag>`, `O`).
    pub fn labels(&self, tag_index: usize) -> Vec<BioLabel> {
        self.rows[tag_index]
            .iter()
            .map(|&k| BioLabel::new(k, &self.tags[tag_index]))
            .collect()
    }

    pub fn token_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Rebuilds layers from per-token feature columns.
    pub fn from_columns(columns: &FeatureColumns) -> Self {
        let tags = columns.tags().to_vec();
        let rows = (0..tags.len())
            .map(|k| (0..columns.token_count()).map(|t| columns.kinds(t)[k]).collect())
            .collect();
        Self { tags, rows }
    }
}

fn layer_row(len: usize, spans: &[MatchSpan]) -> Vec<BioKind> {
    let mut row = vec![BioKind::O; len];
    for span in spans {
        row[span.start..span.end].copy_from_slice(&span.tags);
    }
    row
}

/// Full and (optionally) partial spans of one type for one sentence, with
/// full matches taking precedence.
pub fn match_spans(sentence: &Sentence, index: &MatchIndex, enable_partial: bool, policy: &PartialPolicy) -> Vec<MatchSpan> {
    let ids = index.encode_sentence(sentence);
    let table = index.occurrence_table(&ids);
    let len = sentence.len();
    let mut spans = full_spans(&table, len, index.tag());
    if enable_partial && sentence.mode == TokenMode::Word {
        let mut blocked = vec![false; len];
        for s in &spans {
            blocked[s.start..s.end].iter_mut().for_each(|b| *b = true);
        }
        spans.extend(partial_spans(&table, len, index.tag(), policy.min_len(index.tag()), &blocked));
        spans.sort_unstable_by_key(|s| s.start);
    }
    spans
}

/// Feature layers for a sentence, one row per index in the given order.
/// Rows are computed independently and may overlap across types.
pub fn annotate(sentence: &Sentence, indexes: &[MatchIndex], enable_partial: bool, policy: &PartialPolicy) -> FeatureLayers {
    let tags = indexes.iter().map(|i| i.tag().to_string()).collect();
    let rows = indexes
        .iter()
        .map(|index| layer_row(sentence.len(), &match_spans(sentence, index, enable_partial, policy)))
        .collect();
    FeatureLayers { tags, rows }
}

/// Per token, per type: B → (1,0,0), I → (0,1,0), O → (0,0,1), types in
/// registry order.
///
/// # Panics
/// If the layer tags differ from the registry codes.
pub fn encode_one_hot(layers: &FeatureLayers, registry: &TagRegistry) -> FeatureColumns {
    assert!(
        layers.tags.iter().map(String::as_str).eq(registry.codes()),
        "feature layers do not follow the registry order"
    );
    let rows = (0..layers.token_count())
        .map(|t| layers.rows.iter().map(|r| r[t]).collect())
        .collect();
    FeatureColumns::new(layers.tags.clone(), rows).expect("rectangular layers")
}

#[derive(Debug, Clone)]
pub struct AnnotatorOptions {
    pub language: Language,
    pub sources: Vec<Source>,
    pub mode: TokenMode,
    pub case: CasePolicy,
    pub partial: bool,
    pub policy: PartialPolicy,
}

/// One index per registry type, built once and shared by all sentences.
#[derive(Debug, Clone)]
pub struct GazetteerAnnotator {
    indexes: Vec<MatchIndex>,
    partial: bool,
    policy: PartialPolicy,
}

impl GazetteerAnnotator {
    /// Builds the per-type indexes in parallel. Types without a gazetteer
    /// group get empty indexes.
    pub fn build(gazetteer: &Gazetteer, registry: &TagRegistry, options: &AnnotatorOptions) -> Self {
        let indexes = registry
            .codes()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|tag| MatchIndex::build(gazetteer, options.language, tag, &options.sources, options.mode, options.case))
            .collect();
        Self {
            indexes,
            partial: options.partial && options.mode == TokenMode::Word,
            policy: options.policy.clone(),
        }
    }

    pub fn from_indexes(indexes: Vec<MatchIndex>, partial: bool, policy: PartialPolicy) -> Self {
        Self {
            indexes,
            partial,
            policy,
        }
    }

    pub fn indexes(&self) -> &[MatchIndex] {
        &self.indexes
    }

    pub fn annotate(&self, sentence: &Sentence) -> FeatureLayers {
        annotate(sentence, &self.indexes, self.partial, &self.policy)
    }

    /// Annotates every sentence, fanning out over the current rayon pool;
    /// results keep input order.
    pub fn annotate_document(&self, doc: &Document) -> Vec<FeatureLayers> {
        doc.sentences.par_iter().map(|s| self.annotate(s)).collect()
    }
}
