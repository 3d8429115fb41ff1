use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use crate::model::{split_name, Gazetteer, GroupKey, Language, Source};
use crate::wikidata::RawNameRecord;

use super::{clean_name, collapse_whitespace, FilterRuleSet, RejectReason};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Accepted names already present in the group.
    pub duplicates: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectRecord {
    pub name: String,
    pub tag: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub groups: BTreeMap<GroupKey, GroupStats>,
    pub rejects: Vec<RejectRecord>,
}

impl BuildReport {
    pub fn totals(&self) -> GroupStats {
        self.groups.values().fold(GroupStats::default(), |a, s| GroupStats {
            accepted: a.accepted + s.accepted,
            rejected: a.rejected + s.rejected,
            duplicates: a.duplicates + s.duplicates,
        })
    }

    /// `name<TAB>type<TAB>reason`, one line per rejected name.
    pub fn write_reject_log<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.rejects {
            writeln!(out, "{}\t{}\t{}", r.name, r.tag, r.reason)?;
        }
        Ok(())
    }
}

/// Accumulates cleaned names into gazetteer groups.
#[derive(Debug)]
pub struct GazetteerBuilder<'r> {
    rules: &'r FilterRuleSet,
    gazetteer: Gazetteer,
    report: BuildReport,
}

impl<'r> GazetteerBuilder<'r> {
    pub fn new(rules: &'r FilterRuleSet) -> Self {
        Self {
            rules,
            gazetteer: Gazetteer::new(),
            report: BuildReport::default(),
        }
    }

    pub fn add_name<'t>(&mut self, text: &str, language: Language, source: Source, tags: impl IntoIterator<Item = &'t str>) {
        for tag in tags {
            let key = GroupKey::new(language, tag, source);
            self.gazetteer.ensure_group(key.clone());
            let stats = self.report.groups.entry(key.clone()).or_default();
            match clean_name(text, tag, self.rules) {
                Ok(name) => {
                    stats.accepted += 1;
                    if !self.gazetteer.insert_tokens(key, split_name(&name)) {
                        stats.duplicates += 1;
                    }
                }
                Err(reason) => {
                    stats.rejected += 1;
                    self.report.rejects.push(RejectRecord {
                        name: collapse_whitespace(text),
                        tag: tag.to_string(),
                        reason,
                    });
                }
            }
        }
    }

    pub fn add_record(&mut self, record: &RawNameRecord, tags: &BTreeSet<String>) {
        self.add_name(&record.text, record.language, record.kind.source(), tags.iter().map(String::as_str));
    }

    pub fn finish(self) -> (Gazetteer, BuildReport) {
        (self.gazetteer, self.report)
    }
}

/// Cleans every record under each of its types and collects the survivors.
pub fn build_gazetteer<I>(records: I, rules: &FilterRuleSet) -> (Gazetteer, BuildReport)
where
    I: IntoIterator<Item = (RawNameRecord, BTreeSet<String>)>,
{
    let mut b = GazetteerBuilder::new(rules);
    for (record, tags) in records {
        b.add_record(&record, &tags);
    }
    b.finish()
}
