use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::corpus::Document;
use crate::model::{entity_spans, Gazetteer, Language, Source, TokenMode};

use super::Table;

#[derive(Debug, Clone)]
pub struct CoverageOptions {
    pub language: Language,
    pub sources: Vec<Source>,
    /// Types to report. Empty means every type attested in the gold labels.
    pub types: Vec<String>,
    /// Count distinct surface strings instead of mentions.
    pub unique: bool,
    /// Compare surfaces after lowercasing.
    pub fold_case: bool,
}

impl CoverageOptions {
    pub fn new(language: Language) -> Self {
        Self {
            language,
            sources: Source::ALL.to_vec(),
            types: Vec::new(),
            unique: false,
            fold_case: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoverageRow {
    pub covered: usize,
    pub total: usize,
}

impl CoverageRow {
    /// `None` when there is nothing to cover.
    pub fn percent(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.covered as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoverageReport {
    pub rows: BTreeMap<String, CoverageRow>,
    pub unique: bool,
}

impl CoverageReport {
    pub fn table(&self) -> Table {
        let unit = if self.unique { "surfaces" } else { "mentions" };
        let mut t = Table::new(["type", "covered", unit, "percent"]);
        for (tag, row) in &self.rows {
            let pct = row.percent().map_or("n/a".to_string(), |p| format!("{p:.1}"));
            t.push([tag.clone(), row.covered.to_string(), row.total.to_string(), pct]);
        }
        t
    }
}

fn normalize(text: &str, mode: TokenMode, fold: bool) -> String {
    let s = match mode {
        TokenMode::Word => text.to_string(),
        TokenMode::Character => text.chars().filter(|c| !c.is_whitespace()).collect(),
    };
    if fold {
        s.to_lowercase()
    } else {
        s
    }
}

/// Fraction of gold mentions whose exact surface is a complete entry of the
/// same-type gazetteer group.
pub fn coverage(doc: &Document, gazetteer: &Gazetteer, options: &CoverageOptions) -> CoverageReport {
    let mut rows: BTreeMap<String, CoverageRow> =
        options.types.iter().map(|t| (t.clone(), CoverageRow::default())).collect();
    let restrict = !options.types.is_empty();
    let mut dictionaries: BTreeMap<(String, TokenMode), HashSet<String>> = BTreeMap::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();

    for sentence in &doc.sentences {
        for span in entity_spans(&sentence.gold_labels()) {
            if restrict && !rows.contains_key(&span.tag) {
                continue;
            }
            let surface = normalize(&sentence.join_range(span.start, span.end), sentence.mode, options.fold_case);
            if options.unique && !seen.insert((span.tag.clone(), surface.clone())) {
                continue;
            }
            let dict = dictionaries.entry((span.tag.clone(), sentence.mode)).or_insert_with(|| {
                gazetteer
                    .union(options.language, &span.tag, &options.sources)
                    .into_iter()
                    .map(|tokens| normalize(&tokens.join(" "), sentence.mode, options.fold_case))
                    .collect()
            });
            let row = rows.entry(span.tag).or_default();
            row.total += 1;
            if dict.contains(&surface) {
                row.covered += 1;
            }
        }
    }
    CoverageReport {
        rows,
        unique: options.unique,
    }
}
