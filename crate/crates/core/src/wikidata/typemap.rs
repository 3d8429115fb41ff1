use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use super::Qid;

#[derive(Debug, Error)]
pub enum TypeMapError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Fine-grained Wikidata type to target tag codes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeMap {
    map: BTreeMap<Qid, BTreeSet<String>>,
}

impl TypeMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, qid: Qid, tag: &str) {
        self.map.entry(qid).or_default().insert(tag.to_string());
    }

    /// Empty for unmapped ids.
    pub fn get(&self, qid: Qid) -> impl Iterator<Item = &str> {
        self.map.get(&qid).into_iter().flatten().map(String::as_str)
    }

    pub fn contains(&self, qid: Qid) -> bool {
        self.map.contains_key(&qid)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Qid, &BTreeSet<String>)> {
        self.map.iter().map(|(q, t)| (*q, t))
    }

    /// Fine-grained types mapped to `tag`, in id order.
    pub fn types_for(&self, tag: &str) -> Vec<Qid> {
        self.map.iter().filter(|(_, t)| t.contains(tag)).map(|(q, _)| *q).collect()
    }

    pub fn tags(&self) -> BTreeSet<&str> {
        self.map.values().flatten().map(String::as_str).collect()
    }

    /// `Qid<TAB>code[,code...]` lines sorted by numeric id. `#` comments and
    /// blank lines are skipped; repeated ids merge.
    pub fn read<R: BufRead>(reader: R) -> Result<Self, TypeMapError> {
        let mut out = Self::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let err = |message: String| TypeMapError::Line { line: i + 1, message };
            let text = line.trim_end_matches('\r');
            if text.trim().is_empty() || text.starts_with('#') {
                continue;
            }
            let (id, codes) = text
                .split_once('\t')
                .ok_or_else(|| err("expected Qid<TAB>codes".into()))?;
            let qid: Qid = id.trim().parse().map_err(|e: super::QidError| err(e.to_string()))?;
            let mut any = false;
            for code in codes.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                if code.chars().any(char::is_whitespace) {
                    return Err(err(format!("invalid tag code `{code}`")));
                }
                out.insert(qid, code);
                any = true;
            }
            if !any {
                return Err(err(format!("{qid} maps to no tag")));
            }
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (q, tags) in &self.map {
            let codes: Vec<&str> = tags.iter().map(String::as_str).collect();
            writeln!(s, "{q}\t{}", codes.join(",")).unwrap();
        }
        s
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        out.write_all(self.to_text().as_bytes())
    }
}

/// Union of the tags of every listed type. Empty means the entity is of no
/// interest.
pub fn resolve_target_types(instance_of: &[Qid], map: &TypeMap) -> BTreeSet<String> {
    instance_of.iter().flat_map(|q| map.get(*q)).map(str::to_string).collect()
}
