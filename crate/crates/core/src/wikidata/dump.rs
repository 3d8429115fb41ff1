use std::collections::{BTreeSet, HashMap, VecDeque};
use std::io::{self, BufRead};

use serde::Deserialize;

use super::{resolve_target_types, LabelKind, Qid, RawNameRecord, TypeMap};
use crate::model::Language;

/// Default cap on a single entity line.
pub const DEFAULT_MAX_LINE: usize = 64 << 20;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DumpStats {
    pub lines: usize,
    pub entities: usize,
    /// Entities with at least one target type.
    pub matched: usize,
    pub records: usize,
    pub malformed: usize,
    /// Lines longer than the cap, skipped unread.
    pub oversized: usize,
    /// Largest number of bytes held for one line.
    pub peak_line_bytes: usize,
}

#[derive(Deserialize)]
struct Term {
    value: String,
}

#[derive(Deserialize)]
struct Snak {
    datavalue: Option<DataValue>,
}

#[derive(Deserialize)]
struct DataValue {
    value: serde_json::Value,
}

#[derive(Deserialize)]
struct Statement {
    mainsnak: Snak,
}

#[derive(Deserialize, Default)]
struct Claims {
    #[serde(rename = "P31", default)]
    instance_of: Vec<Statement>,
}

#[derive(Deserialize)]
struct Entity {
    id: String,
    #[serde(default)]
    labels: HashMap<String, Term>,
    #[serde(default)]
    aliases: HashMap<String, Vec<Term>>,
    #[serde(default)]
    claims: Claims,
}

/// Streams (record, target types) pairs out of a Wikidata JSON dump: a
/// JSON array with one entity per line. Memory use is bounded by the
/// longest accepted line.
pub struct DumpScanner<'m, R> {
    reader: R,
    map: &'m TypeMap,
    languages: Vec<Language>,
    max_line: usize,
    line: Vec<u8>,
    pending: VecDeque<(RawNameRecord, BTreeSet<String>)>,
    stats: DumpStats,
    failed: bool,
}

pub fn scan_dump<'m, R: BufRead>(reader: R, map: &'m TypeMap, languages: &[Language]) -> DumpScanner<'m, R> {
    DumpScanner::new(reader, map, languages, DEFAULT_MAX_LINE)
}

impl<'m, R: BufRead> DumpScanner<'m, R> {
    pub fn new(reader: R, map: &'m TypeMap, languages: &[Language], max_line: usize) -> Self {
        Self {
            reader,
            map,
            languages: languages.to_vec(),
            max_line,
            line: Vec::new(),
            pending: VecDeque::new(),
            stats: DumpStats::default(),
            failed: false,
        }
    }

    pub fn stats(&self) -> DumpStats {
        self.stats
    }

    /// Reads one line into the buffer. Returns false at end of input.
    fn read_line(&mut self) -> io::Result<bool> {
        self.line.clear();
        let limit = self.max_line as u64 + 1;
        let n = io::Read::take(&mut self.reader, limit).read_until(b'\n', &mut self.line)?;
        if n == 0 {
            return Ok(false);
        }
        self.stats.lines += 1;
        self.stats.peak_line_bytes = self.stats.peak_line_bytes.max(self.line.capacity());
        if self.line.len() > self.max_line && self.line.last() != Some(&b'\n') {
            self.stats.oversized += 1;
            self.line.clear();
            self.skip_rest()?;
        }
        Ok(true)
    }

    fn skip_rest(&mut self) -> io::Result<()> {
        loop {
            let buf = self.reader.fill_buf()?;
            if buf.is_empty() {
                return Ok(());
            }
            match buf.iter().position(|&b| b == b'\n') {
                Some(i) => {
                    self.reader.consume(i + 1);
                    return Ok(());
                }
                None => {
                    let n = buf.len();
                    self.reader.consume(n);
                }
            }
        }
    }

    fn handle_line(&mut self) {
        let text = self.line.trim_ascii();
        let text = text.strip_suffix(b",").unwrap_or(text);
        if text.is_empty() || text == b"[" || text == b"]" {
            return;
        }
        let entity: Entity = match serde_json::from_slice(text) {
            Ok(e) => e,
            Err(_) => {
                self.stats.malformed += 1;
                return;
            }
        };
        self.stats.entities += 1;
        let Ok(id) = entity.id.parse::<Qid>() else {
            return;
        };
        let types: Vec<Qid> = entity
            .claims
            .instance_of
            .iter()
            .filter_map(|s| s.mainsnak.datavalue.as_ref())
            .filter_map(|d| d.value.get("id").and_then(|v| v.as_str()))
            .filter_map(|s| s.parse().ok())
            .collect();
        let tags = resolve_target_types(&types, self.map);
        if tags.is_empty() {
            return;
        }
        self.stats.matched += 1;
        for lang in &self.languages {
            let code = lang.as_str();
            let label = entity.labels.get(code).map(|t| (LabelKind::Canonical, t));
            let aliases = entity.aliases.get(code).into_iter().flatten().map(|t| (LabelKind::Alias, t));
            for (kind, term) in label.into_iter().chain(aliases) {
                self.stats.records += 1;
                self.pending.push_back((
                    RawNameRecord {
                        entity: id,
                        kind,
                        text: term.value.clone(),
                        language: *lang,
                    },
                    tags.clone(),
                ));
            }
        }
    }
}

impl<R: BufRead> Iterator for DumpScanner<'_, R> {
    type Item = io::Result<(RawNameRecord, BTreeSet<String>)>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(item) = self.pending.pop_front() {
                return Some(Ok(item));
            }
            if self.failed {
                return None;
            }
            match self.read_line() {
                Ok(true) => self.handle_line(),
                Ok(false) => return None,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}
