use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use thiserror::Error;

use super::query::{Query, QueryResult, QueryTransport, TransportError};
use super::{Qid, TypeMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{source}\nquery:\n{query}")]
pub struct QueryError {
    pub query: String,
    #[source]
    pub source: TransportError,
}

/// Largest id list sent in one batch query.
const MAX_BATCH: usize = 500;

/// Runs `make` over `items` in batches, halving the batch after each
/// timeout. A single-item batch that still times out is an error.
fn batched<T: QueryTransport + ?Sized>(
    transport: &T,
    items: &[Qid],
    make: impl Fn(Vec<Qid>) -> Query,
) -> Result<Vec<QueryResult>, QueryError> {
    let mut out = Vec::new();
    let mut size = items.len().clamp(1, MAX_BATCH);
    let mut start = 0;
    while start < items.len() {
        let end = (start + size).min(items.len());
        let query = make(items[start..end].to_vec());
        match transport.execute(&query) {
            Ok(r) => {
                out.push(r);
                start = end;
            }
            Err(TransportError::Timeout) if size > 1 => size /= 2,
            Err(source) => {
                return Err(QueryError {
                    query: query.text(),
                    source,
                })
            }
        }
    }
    Ok(out)
}

/// Subtypes of `root`, itself included, that have at least one direct
/// instance; sorted and deduplicated. Tries one closure query first and
/// falls back to a level-by-level walk when that times out.
pub fn discover_instantiated_subtypes<T: QueryTransport + ?Sized>(root: Qid, transport: &T) -> Result<Vec<Qid>, QueryError> {
    let query = Query::InstantiatedSubtypes { root };
    match transport.execute(&query) {
        Ok(r) => {
            let set: BTreeSet<Qid> = r.qids("type").into_iter().collect();
            Ok(set.into_iter().collect())
        }
        Err(TransportError::Timeout) => level_wise(root, transport),
        Err(source) => Err(QueryError {
            query: query.text(),
            source,
        }),
    }
}

fn level_wise<T: QueryTransport + ?Sized>(root: Qid, transport: &T) -> Result<Vec<Qid>, QueryError> {
    let mut seen = BTreeSet::from([root]);
    let mut frontier = vec![root];
    while !frontier.is_empty() {
        let results = batched(transport, &frontier, |parents| Query::DirectSubclasses { parents })?;
        let mut next = BTreeSet::new();
        for r in &results {
            for q in r.qids("type") {
                if seen.insert(q) {
                    next.insert(q);
                }
            }
        }
        frontier = next.into_iter().collect();
    }
    let all: Vec<Qid> = seen.into_iter().collect();
    let results = batched(transport, &all, |types| Query::HasInstances { types })?;
    let set: BTreeSet<Qid> = results.iter().flat_map(|r| r.qids("type")).collect();
    Ok(set.into_iter().collect())
}

/// Maps every discovered subtype to each target whose roots reach it.
pub fn build_type_map(targets: &[(String, Vec<Qid>)], discovered: &BTreeMap<Qid, Vec<Qid>>) -> TypeMap {
    let mut map = TypeMap::new();
    for (tag, roots) in targets {
        for root in roots {
            for q in discovered.get(root).into_iter().flatten() {
                map.insert(*q, tag);
            }
        }
    }
    map
}

/// Bundled starting points for the target roots, in the format
/// [`read_target_roots`] reads.
pub const DEFAULT_TYPE_ROOTS: &str = include_str!("../../data/type_roots.tsv");

/// Reads `TAG<TAB>Qid[,Qid...]` lines; `#` starts a comment.
pub fn read_target_roots<R: BufRead>(reader: R) -> Result<Vec<(String, Vec<Qid>)>, String> {
    let mut out: Vec<(String, Vec<Qid>)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (tag, ids) = text
            .split_once('\t')
            .ok_or_else(|| format!("line {}: expected TAG<TAB>ids", i + 1))?;
        let mut roots = Vec::new();
        for id in ids.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            roots.push(id.parse::<Qid>().map_err(|e| format!("line {}: {e}", i + 1))?);
        }
        match out.iter_mut().find(|(t, _)| t == tag.trim()) {
            Some((_, existing)) => existing.extend(roots),
            None => out.push((tag.trim().to_string(), roots)),
        }
    }
    Ok(out)
}
