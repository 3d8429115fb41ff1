use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const SHIPPED_RULES: &str = include_str!("../../data/ru_inflection_rules.tsv");
const SHIPPED_FAMILIAR: &str = include_str!("../../data/ru_familiar_forms.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    Nominative,
    Genitive,
    Dative,
    Accusative,
    Instrumental,
    Prepositional,
}

impl Case {
    pub const ALL: [Case; 6] = [
        Case::Nominative,
        Case::Genitive,
        Case::Dative,
        Case::Accusative,
        Case::Instrumental,
        Case::Prepositional,
    ];

    pub const OBLIQUE: [Case; 5] = [
        Case::Genitive,
        Case::Dative,
        Case::Accusative,
        Case::Instrumental,
        Case::Prepositional,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Nominative => "nominative",
            Case::Genitive => "genitive",
            Case::Dative => "dative",
            Case::Accusative => "accusative",
            Case::Instrumental => "instrumental",
            Case::Prepositional => "prepositional",
        })
    }
}

/// The part a token plays in a name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    First,
    Patronymic,
    Surname,
    Noun,
    Adjective,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(Role::First),
            "patronymic" => Ok(Role::Patronymic),
            "surname" => Ok(Role::Surname),
            "noun" => Ok(Role::Noun),
            "adj" => Ok(Role::Adjective),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Masculine,
    Feminine,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct RuleFileError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionRule {
    pub name: String,
    /// `None` applies to every type.
    pub types: Option<BTreeSet<String>>,
    pub role: Role,
    pub gender: Option<Gender>,
    /// Letters allowed directly before the suffix; `None` allows any.
    pub context: Option<Vec<char>>,
    pub suffix: String,
    pub endings: [String; 6],
}

impl InflectionRule {
    pub fn applies_to_type(&self, tag: &str) -> bool {
        self.types.as_ref().is_none_or(|t| t.contains(tag))
    }

    /// Length in bytes of the stem left after removing the suffix, when
    /// the rule matches `token`.
    pub fn stem_len(&self, token: &str) -> Option<usize> {
        let stem = token.strip_suffix(self.suffix.as_str())?;
        let last = stem.chars().next_back()?;
        if !last.is_alphabetic() {
            return None;
        }
        if let Some(ctx) = &self.context {
            if !ctx.contains(&last.to_lowercase().next().unwrap_or(last)) {
                return None;
            }
        }
        Some(stem.len())
    }

    pub fn ending(&self, case: Case) -> &str {
        &self.endings[case.index()]
    }

    /// `token` declined into `case`; the caller must have checked that the
    /// rule matches.
    pub fn apply(&self, token: &str, stem_len: usize, case: Case) -> String {
        let mut out = String::with_capacity(stem_len + self.ending(case).len());
        out.push_str(&token[..stem_len]);
        out.push_str(self.ending(case));
        out
    }
}

fn dash(s: &str) -> String {
    if s == "-" {
        String::new()
    } else {
        s.to_string()
    }
}

/// An ordered list of declension rules.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<InflectionRule>,
}

impl RuleSet {
    pub fn new(rules: Vec<InflectionRule>) -> Self {
        Self { rules }
    }

    pub fn rules(&self) -> &[InflectionRule] {
        &self.rules
    }

    pub fn shipped() -> Self {
        Self::parse(SHIPPED_RULES).expect("bundled rules are valid")
    }

    pub fn parse(text: &str) -> Result<Self, RuleFileError> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let err = |message: String| RuleFileError { line: i + 1, message };
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').map(str::trim).collect();
            if f.len() != 12 {
                return Err(err(format!("expected 12 tab-separated fields, found {}", f.len())));
            }
            let types = match f[1] {
                "*" => None,
                list => Some(list.split(',').map(|s| s.trim().to_string()).collect()),
            };
            let role = f[2].parse().map_err(err)?;
            let gender = match f[3] {
                "m" => Some(Gender::Masculine),
                "f" => Some(Gender::Feminine),
                "*" => None,
                other => return Err(err(format!("unknown gender `{other}`"))),
            };
            let context = match f[4] {
                "*" => None,
                letters => Some(letters.chars().collect()),
            };
            let suffix = dash(f[5]);
            let endings: [String; 6] = std::array::from_fn(|k| dash(f[6 + k]));
            if endings[0] != suffix {
                return Err(err(format!("nominative ending `{}` differs from suffix `{suffix}`", endings[0])));
            }
            rules.push(InflectionRule {
                name: f[0].to_string(),
                types,
                role,
                gender,
                context,
                suffix,
                endings,
            });
        }
        Ok(Self { rules })
    }

    /// The applicable rule with the longest suffix, first in file order on
    /// ties, together with the stem length.
    pub fn best(&self, token: &str, tag: &str, role: Role, gender: Option<Gender>) -> Option<(&InflectionRule, usize)> {
        let mut best: Option<(&InflectionRule, usize)> = None;
        for r in &self.rules {
            if r.role != role || !r.applies_to_type(tag) {
                continue;
            }
            if let (Some(g), Some(rg)) = (gender, r.gender) {
                if g != rg {
                    continue;
                }
            }
            let Some(stem) = r.stem_len(token) else {
                continue;
            };
            if best.is_none_or(|(b, _)| r.suffix.len() > b.suffix.len()) {
                best = Some((r, stem));
            }
        }
        best
    }

    pub fn has_role_for(&self, tag: &str, roles: &[Role]) -> bool {
        self.rules.iter().any(|r| roles.contains(&r.role) && r.applies_to_type(tag))
    }
}

/// Familiar and diminutive forms keyed by the nominative first name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FamiliarForms {
    forms: BTreeMap<String, Vec<String>>,
}

impl FamiliarForms {
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_FAMILIAR).expect("bundled familiar forms are valid")
    }

    /// `name<TAB>form,form,...` per line.
    pub fn parse(text: &str) -> Result<Self, RuleFileError> {
        let mut forms: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, list) = line.split_once('\t').ok_or_else(|| RuleFileError {
                line: i + 1,
                message: "expected name<TAB>forms".into(),
            })?;
            let entry = forms.entry(name.trim().to_string()).or_default();
            for f in list.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                if !entry.iter().any(|x| x == f) {
                    entry.push(f.to_string());
                }
            }
        }
        Ok(Self { forms })
    }

    pub fn get(&self, name: &str) -> &[String] {
        self.forms.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.forms.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_parse() {
        let r = RuleSet::shipped();
        assert!(r.rules().len() > 40);
        assert_eq!(FamiliarForms::shipped().get("Владимир").len(), 7);
        assert!(FamiliarForms::shipped().get("Zed").is_empty());
    }

    #[test]
    fn longest_suffix_wins() {
        let r = RuleSet::shipped();
        let (rule, stem) = r.best("Путин", "PER", Role::Surname, None).unwrap();
        assert_eq!(rule.name, "sur-in-m");
        assert_eq!(rule.apply("Путин", stem, Case::Instrumental), "Путиным");
        let (rule, _) = r.best("Мария", "PER", Role::First, None).unwrap();
        assert_eq!(rule.name, "first-ija");
        let (rule, _) = r.best("Ольга", "PER", Role::First, None).unwrap();
        assert_eq!(rule.name, "first-a-velar");
        assert!(r.best("Путин", "CHEM", Role::Surname, None).is_none());
        assert!(r.best("Путина", "PER", Role::Surname, Some(Gender::Masculine)).is_none());
    }

    #[test]
    fn malformed_lines_are_reported() {
        let bad = "x\tPER\tfirst\tm\t*\tа\tо\tы\tе\tу\tой\tе\n";
        assert_eq!(RuleSet::parse(bad).unwrap_err().line, 1);
        assert!(RuleSet::parse("# c\n\nx\tPER\n").is_err());
        assert!(RuleSet::parse("x\tPER\tuncle\tm\t*\tа\tа\tы\tе\tу\tой\tе\n").is_err());
        assert!(FamiliarForms::parse("Иван Ваня\n").is_err());
    }
}
