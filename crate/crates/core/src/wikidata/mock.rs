use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use super::query::{Query, QueryResult, QueryTransport, TransportError};
use super::{LabelKind, Qid};
use crate::model::Language;

/// An in-memory knowledge graph answering [`Query`] values directly, with
/// an optional cost budget above which queries time out. Useful for tests
/// and dry runs.
#[derive(Debug, Default)]
pub struct MockGraph {
    parents: BTreeMap<Qid, BTreeSet<Qid>>,
    instance_of: BTreeMap<Qid, BTreeSet<Qid>>,
    names: BTreeMap<Qid, Vec<(LabelKind, Language, String)>>,
    budget: Option<usize>,
    log: Mutex<Vec<Query>>,
}

fn uri(q: Qid) -> String {
    format!("http://www.wikidata.org/entity/{q}")
}

impl MockGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subclass(mut self, child: Qid, parent: Qid) -> Self {
        self.parents.entry(child).or_default().insert(parent);
        self
    }

    pub fn instance(mut self, item: Qid, ty: Qid) -> Self {
        self.instance_of.entry(item).or_default().insert(ty);
        self
    }

    pub fn name(mut self, item: Qid, kind: LabelKind, language: Language, text: &str) -> Self {
        self.names.entry(item).or_default().push((kind, language, text.to_string()));
        self
    }

    /// Queries whose cost exceeds `budget` time out. Cost is the number of
    /// graph nodes a query touches: the subclass closure for closure
    /// queries, listed ids plus result rows for batch queries, and the
    /// returned page times the number of listed types for name queries.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn queries(&self) -> Vec<Query> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    fn children(&self, parent: Qid) -> impl Iterator<Item = Qid> + '_ {
        self.parents
            .iter()
            .filter(move |(_, ps)| ps.contains(&parent))
            .map(|(c, _)| *c)
    }

    fn closure(&self, root: Qid) -> BTreeSet<Qid> {
        let mut seen = BTreeSet::from([root]);
        let mut stack = vec![root];
        while let Some(q) = stack.pop() {
            for c in self.children(q) {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen
    }

    fn instantiated(&self, ty: Qid) -> bool {
        self.instance_of.values().any(|ts| ts.contains(&ty))
    }

    fn name_rows(&self, types: &[Qid], language: Language) -> Vec<(String, &'static str, String)> {
        let mut rows = BTreeSet::new();
        for (item, ts) in &self.instance_of {
            if !types.iter().any(|t| ts.contains(t)) {
                continue;
            }
            for (kind, lang, text) in self.names.get(item).into_iter().flatten() {
                if *lang == language {
                    let k = match kind {
                        LabelKind::Canonical => "canonical",
                        LabelKind::Alias => "alias",
                    };
                    rows.insert((uri(*item), k, text.clone()));
                }
            }
        }
        rows.into_iter().collect()
    }
}

fn row(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

impl QueryTransport for MockGraph {
    fn execute(&self, query: &Query) -> Result<QueryResult, TransportError> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).push(query.clone());
        let (cost, rows) = match query {
            Query::InstantiatedSubtypes { root } => {
                let all = self.closure(*root);
                let rows = all
                    .iter()
                    .filter(|q| self.instantiated(**q))
                    .map(|q| row(&[("type", uri(*q))]))
                    .collect();
                (all.len(), rows)
            }
            Query::DirectSubclasses { parents } => {
                let mut rows = Vec::new();
                for p in parents {
                    for c in self.children(*p) {
                        rows.push(row(&[("parent", uri(*p)), ("type", uri(c))]));
                    }
                }
                (parents.len() + rows.len(), rows)
            }
            Query::HasInstances { types } => {
                let rows = types
                    .iter()
                    .filter(|q| self.instantiated(**q))
                    .map(|q| row(&[("type", uri(*q))]))
                    .collect();
                (types.len(), rows)
            }
            Query::Names {
                types,
                language,
                limit,
                offset,
            } => {
                let rows: Vec<_> = self
                    .name_rows(types, *language)
                    .into_iter()
                    .skip(*offset)
                    .take(*limit)
                    .map(|(item, kind, name)| row(&[("item", item), ("kind", kind.to_string()), ("name", name)]))
                    .collect();
                (rows.len() * types.len(), rows)
            }
        };
        if self.budget.is_some_and(|b| cost > b) {
            return Err(TransportError::Timeout);
        }
        Ok(QueryResult { rows })
    }
}
