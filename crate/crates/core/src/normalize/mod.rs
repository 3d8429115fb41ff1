//! Turning raw names into gazetteer entries: whitespace and punctuation
//! cleanup, Wikipedia-style disambiguator removal, and per-type rejection
//! rules.

mod builder;
mod rules;

pub use builder::{build_gazetteer, BuildReport, GazetteerBuilder, GroupStats, RejectRecord};
pub use rules::{FilterRuleSet, FilterRules, PunctuationPolicy, RuleSetError};

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;

static PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\p{P}$").expect("static pattern"));

fn is_punct(c: char) -> bool {
    let mut buf = [0u8; 4];
    PUNCT.is_match(c.encode_utf8(&mut buf))
}

/// Why a name was dropped. Carries the first rule that fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Empty,
    PunctuationOnly,
    Pattern(String),
    TooFewTokens,
    TooManyTokens,
    TooShort,
    TooLong,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Empty => f.write_str("empty"),
            RejectReason::PunctuationOnly => f.write_str("punctuation-only"),
            RejectReason::Pattern(p) => write!(f, "pattern:{p}"),
            RejectReason::TooFewTokens => f.write_str("too-few-tokens"),
            RejectReason::TooManyTokens => f.write_str("too-many-tokens"),
            RejectReason::TooShort => f.write_str("too-short"),
            RejectReason::TooLong => f.write_str("too-long"),
        }
    }
}

pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Removes one trailing `(...)` group without nested parentheses, as long
/// as something is left in front of it.
fn strip_trailing_parenthetical(s: &str) -> &str {
    let Some(body) = s.strip_suffix(')') else {
        return s;
    };
    let Some(open) = body.rfind('(') else {
        return s;
    };
    if body[open + 1..].contains(')') {
        return s;
    }
    let head = body[..open].trim_end();
    if head.is_empty() {
        s
    } else {
        head
    }
}

/// A final `.` belongs to the name when the last token is an abbreviation:
/// it contains another dot (`U.S.`) or is a short capitalized word (`Jr.`).
fn keeps_final_dot(s: &str) -> bool {
    let Some(body) = s.strip_suffix('.') else {
        return false;
    };
    let last = body.rsplit(' ').next().unwrap_or(body);
    if last.contains('.') {
        return true;
    }
    let mut chars = last.chars();
    match chars.next() {
        Some(first) if first.is_uppercase() => {
            let n = 1 + chars.clone().count();
            n <= 3 && chars.all(char::is_alphabetic)
        }
        _ => false,
    }
}

const BRACKETS: [(char, char); 4] = [('(', ')'), ('[', ']'), ('{', '}'), ('«', '»')];

fn closer_of(c: char) -> Option<char> {
    BRACKETS.iter().find(|p| p.0 == c).map(|p| p.1)
}

fn opener_of(c: char) -> Option<char> {
    BRACKETS.iter().find(|p| p.1 == c).map(|p| p.0)
}

/// Strips edge punctuation. A bracket stays when its partner is inside
/// the name, unless the pair wraps the whole name.
fn trim_edges(s: &str) -> String {
    let mut out = s;
    if let (Some(first), Some(last)) = (out.chars().next(), out.chars().next_back()) {
        if out.len() > first.len_utf8() && closer_of(first) == Some(last) {
            let inner = &out[first.len_utf8()..out.len() - last.len_utf8()];
            if !inner.contains(first) && !inner.contains(last) {
                out = inner;
            }
        }
    }
    while let Some(c) = out.chars().next() {
        let paired = closer_of(c).is_some_and(|close| out[c.len_utf8()..].contains(close));
        if !is_punct(c) || paired {
            break;
        }
        out = &out[c.len_utf8()..];
    }
    while let Some(c) = out.chars().next_back() {
        let body = &out[..out.len() - c.len_utf8()];
        let paired = opener_of(c).is_some_and(|open| body.contains(open));
        if !is_punct(c) || paired || (c == '.' && keeps_final_dot(out)) {
            break;
        }
        out = body;
    }
    out.to_string()
}

fn apply_punctuation(s: &str, policy: PunctuationPolicy) -> String {
    match policy {
        PunctuationPolicy::Keep => s.to_string(),
        PunctuationPolicy::TrimEdges => trim_edges(s),
        PunctuationPolicy::RemoveAll => s.chars().filter(|&c| !is_punct(c)).collect(),
    }
}

fn transform(s: &str, rules: &FilterRules) -> String {
    let s = collapse_whitespace(s);
    let s = if rules.strip_parenthetical {
        strip_trailing_parenthetical(&s).to_string()
    } else {
        s
    };
    collapse_whitespace(&apply_punctuation(&s, rules.punctuation))
}

/// Cleans a raw name under the rules for `tag`. Transformations repeat until
/// nothing changes, so an accepted result cleans to itself.
pub fn clean_name(raw: &str, tag: &str, rules: &FilterRuleSet) -> Result<String, RejectReason> {
    clean_with(raw, rules.for_type(tag))
}

pub fn clean_with(raw: &str, rules: &FilterRules) -> Result<String, RejectReason> {
    let mut name = collapse_whitespace(raw);
    if name.is_empty() {
        return Err(RejectReason::Empty);
    }
    if name.chars().all(|c| c == ' ' || is_punct(c)) {
        return Err(RejectReason::PunctuationOnly);
    }
    loop {
        let next = transform(&name, rules);
        if next == name {
            break;
        }
        name = next;
    }
    if name.is_empty() {
        return Err(RejectReason::Empty);
    }
    if name.chars().all(|c| c == ' ' || is_punct(c)) {
        return Err(RejectReason::PunctuationOnly);
    }
    if let Some(p) = rules.reject.iter().find(|p| p.is_match(&name)) {
        return Err(RejectReason::Pattern(p.as_str().to_string()));
    }
    let tokens = name.split(' ').count();
    if tokens < rules.min_tokens {
        return Err(RejectReason::TooFewTokens);
    }
    if tokens > rules.max_tokens {
        return Err(RejectReason::TooManyTokens);
    }
    let chars = name.chars().count();
    if chars < rules.min_chars {
        return Err(RejectReason::TooShort);
    }
    if chars > rules.max_chars {
        return Err(RejectReason::TooLong);
    }
    Ok(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clean(raw: &str) -> Result<String, RejectReason> {
        clean_with(raw, &FilterRules::default())
    }

    #[test]
    fn strips_disambiguators() {
        assert_eq!(clean("Paris (mythology)").as_deref(), Ok("Paris"));
        assert_eq!(clean("  Paris   (mythology) ").as_deref(), Ok("Paris"));
        assert_eq!(clean("Mercury (planet) (disambiguation)").as_deref(), Ok("Mercury"));
        let keep = FilterRules {
            strip_parenthetical: false,
            punctuation: PunctuationPolicy::Keep,
            ..FilterRules::default()
        };
        assert_eq!(clean_with("Paris (mythology)", &keep).as_deref(), Ok("Paris (mythology)"));
    }

    #[test]
    fn trims_punctuation_but_keeps_abbreviations() {
        assert_eq!(clean("«Спартак»").as_deref(), Ok("Спартак"));
        assert_eq!(clean("\"Hello!\"").as_deref(), Ok("Hello"));
        assert_eq!(clean("U.S.").as_deref(), Ok("U.S."));
        assert_eq!(clean("Washington, D.C.").as_deref(), Ok("Washington, D.C."));
        assert_eq!(clean("Sammy Davis Jr.").as_deref(), Ok("Sammy Davis Jr."));
        assert_eq!(clean("Acme Inc.").as_deref(), Ok("Acme Inc."));
        assert_eq!(clean("Paris.").as_deref(), Ok("Paris"));
        assert_eq!(clean("Hello .").as_deref(), Ok("Hello"));
        assert_eq!(clean("Jean-Paul").as_deref(), Ok("Jean-Paul"));
        assert_eq!(clean("(Paris)").as_deref(), Ok("Paris"));
        assert_eq!(clean("[Paris").as_deref(), Ok("Paris"));
        assert_eq!(clean("(The) Band").as_deref(), Ok("(The) Band"));
        let all = FilterRules {
            punctuation: PunctuationPolicy::RemoveAll,
            ..FilterRules::default()
        };
        assert_eq!(clean_with("U.S. - Army", &all).as_deref(), Ok("US Army"));
    }

    #[test]
    fn rejections_carry_reasons() {
        assert_eq!(clean("   "), Err(RejectReason::Empty));
        assert_eq!(clean("?!…"), Err(RejectReason::PunctuationOnly));
        assert_eq!(clean("X"), Err(RejectReason::TooShort));
        assert_eq!(clean(&"a".repeat(61)), Err(RejectReason::TooLong));
        assert_eq!(clean(&["w"; 11].join(" ")), Err(RejectReason::TooManyTokens));
        let two = FilterRules {
            min_tokens: 2,
            ..FilterRules::default()
        };
        assert_eq!(clean_with("Madonna", &two), Err(RejectReason::TooFewTokens));
    }

    #[test]
    fn type_patterns() {
        let mut set = FilterRuleSet::default();
        set.set(
            "PER",
            FilterRules::default()
                .with_patterns(&["^(Francis of Assisi|Joan of Arc)$"])
                .unwrap(),
        );
        assert_eq!(
            clean_name("Francis of Assisi", "PER", &set),
            Err(RejectReason::Pattern("^(Francis of Assisi|Joan of Arc)$".into()))
        );
        assert_eq!(clean_name("Francis of Assisi", "LOC", &set).as_deref(), Ok("Francis of Assisi"));
        let shipped = FilterRuleSet::shipped();
        assert!(matches!(clean_name("Q42", "ORG", &shipped), Err(RejectReason::Pattern(_))));
        assert!(matches!(clean_name("List of rivers", "LOC", &shipped), Err(RejectReason::Pattern(_))));
        assert!(matches!(clean_name("Louis XIV 2", "PER", &shipped), Err(RejectReason::Pattern(_))));
    }

    #[test]
    fn reasons_render() {
        assert_eq!(RejectReason::TooShort.to_string(), "too-short");
        assert_eq!(RejectReason::Pattern("^x$".into()).to_string(), "pattern:^x$");
    }
}
