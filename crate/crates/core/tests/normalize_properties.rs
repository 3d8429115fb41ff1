use std::collections::BTreeSet;

use gazkit_core::normalize::{build_gazetteer, clean_name, FilterRuleSet, FilterRules, PunctuationPolicy};
use gazkit_core::wikidata::{LabelKind, Qid, RawNameRecord};
use gazkit_core::Language;
use proptest::prelude::*;

const NAME: &str = "[A-Za-zА-я .,()«»\\[\\]!?'\"-]{0,30}";

fn rule_sets() -> Vec<FilterRuleSet> {
    let mut out = vec![FilterRuleSet::shipped(), FilterRuleSet::default()];
    for punctuation in [PunctuationPolicy::Keep, PunctuationPolicy::RemoveAll] {
        for strip_parenthetical in [true, false] {
            out.push(FilterRuleSet::new(FilterRules {
                punctuation,
                strip_parenthetical,
                ..FilterRules::default()
            }));
        }
    }
    out
}

proptest! {
    #[test]
    fn cleaning_is_idempotent(raw in NAME, tag in prop::sample::select(vec!["PER", "ORG", "CHEM"])) {
        for rules in rule_sets() {
            if let Ok(once) = clean_name(&raw, tag, &rules) {
                prop_assert_eq!(clean_name(&once, tag, &rules), Ok(once.clone()), "{:?}", raw);
            }
        }
    }

    #[test]
    fn built_groups_hold_only_accepted_names_and_ignore_order(
        names in prop::collection::vec((NAME, prop::sample::select(vec!["PER", "ORG", "GPE"])), 0..40),
        seed in any::<u64>(),
    ) {
        let rules = FilterRuleSet::shipped();
        let en = Language::new("en").unwrap();
        let records: Vec<_> = names
            .iter()
            .enumerate()
            .map(|(i, (text, tag))| {
                let r = RawNameRecord { entity: Qid(i as u64 + 1), kind: LabelKind::Canonical, text: text.clone(), language: en };
                (r, BTreeSet::from([tag.to_string()]))
            })
            .collect();
        let (g, report) = build_gazetteer(records.clone(), &rules);
        for e in g.entries() {
            prop_assert_eq!(clean_name(&e.text(), &e.tag, &rules), Ok(e.text()));
        }
        let total = report.totals();
        prop_assert_eq!(total.accepted + total.rejected, records.len());

        let mut shuffled = records;
        let n = shuffled.len();
        if n > 1 {
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        let (g2, _) = build_gazetteer(shuffled, &rules);
        prop_assert_eq!(g.group_sizes(), g2.group_sizes());
        prop_assert_eq!(g, g2);
    }
}
