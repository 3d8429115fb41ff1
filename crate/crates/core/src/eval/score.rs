use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::Document;
use crate::model::entity_spans;

use super::{check_alignment, percent, EvalError, Table};

/// Entity counts for one type, or summed over all types.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub gold: usize,
    pub predicted: usize,
    pub correct: usize,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        percent(self.correct, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        percent(self.correct, self.gold)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    fn add(&mut self, other: Counts) {
        self.gold += other.gold;
        self.predicted += other.predicted;
        self.correct += other.correct;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScoreReport {
    pub per_type: BTreeMap<String, Counts>,
    pub micro: Counts,
}

impl ScoreReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["type", "precision", "recall", "f1", "gold", "predicted", "correct"]);
        let rows = self.per_type.iter().map(|(k, v)| (k.as_str(), v));
        for (name, c) in rows.chain(std::iter::once(("micro", &self.micro))) {
            t.push([
                name.to_string(),
                format!("{:.2}", c.precision()),
                format!("{:.2}", c.recall()),
                format!("{:.2}", c.f1()),
                c.gold.to_string(),
                c.predicted.to_string(),
                c.correct.to_string(),
            ]);
        }
        t
    }
}

/// Entity-level scoring: a predicted entity is correct when its span and
/// type both equal a gold entity.
pub fn score(gold: &Document, predicted: &Document) -> Result<ScoreReport, EvalError> {
    check_alignment(gold, predicted)?;
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    for (g, p) in gold.sentences.iter().zip(&predicted.sentences) {
        let gs = entity_spans(&g.gold_labels());
        let ps = entity_spans(&p.gold_labels());
        let gold_set: BTreeSet<_> = gs.iter().collect();
        for e in &gs {
            per_type.entry(e.tag.clone()).or_default().gold += 1;
        }
        for e in &ps {
            let c = per_type.entry(e.tag.clone()).or_default();
            c.predicted += 1;
            if gold_set.contains(e) {
                c.correct += 1;
            }
        }
    }
    let mut micro = Counts::default();
    for c in per_type.values() {
        micro.add(*c);
    }
    Ok(ScoreReport { per_type, micro })
}
