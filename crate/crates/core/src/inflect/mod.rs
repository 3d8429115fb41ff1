//! Rule-driven Russian declension of gazetteer names.
//!
//! Person names are split into first name, patronymic and surname; every
//! declinable part takes the same case, familiar forms of the first name
//! are substituted, and the full name, the surname alone, first name plus
//! surname and first name plus patronymic are produced. Other names decline
//! their first head-noun candidate together with the adjectives directly in
//! front of it. Only the five oblique cases are generated; the nominative
//! lives in the canonical lists.

mod rules;

pub use rules::{Case, FamiliarForms, Gender, InflectionRule, Role, RuleFileError, RuleSet};

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::model::{Gazetteer, GazetteerEntry, GroupKey, Language, Source};

const PERSON_ROLES: [Role; 3] = [Role::First, Role::Patronymic, Role::Surname];

/// One output token and where it came from. `form` equals `base` up to
/// `stem_len` bytes; only the part after that was rewritten.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectedToken {
    /// The nominative token the form was derived from: the input token or a
    /// familiar form substituted for it.
    pub base: String,
    pub stem_len: usize,
    pub form: String,
    /// Rule name, when the token was declined.
    pub rule: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    pub case: Case,
    pub tokens: Vec<InflectedToken>,
}

impl Variant {
    pub fn forms(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.form.clone()).collect()
    }
}

/// Cyrillic words of at least two letters that are not all-caps acronyms.
fn declinable(token: &str) -> bool {
    let mut letters = 0;
    for c in token.chars() {
        if c == '-' {
            continue;
        }
        if !matches!(c, '\u{0400}'..='\u{04FF}') || !c.is_alphabetic() {
            return false;
        }
        letters += 1;
    }
    letters >= 2 && !token.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
}

pub struct Inflector<'a> {
    pub rules: &'a RuleSet,
    pub familiar: &'a FamiliarForms,
}

impl<'a> Inflector<'a> {
    pub fn new(rules: &'a RuleSet, familiar: &'a FamiliarForms) -> Self {
        Self { rules, familiar }
    }

    fn rule(&self, token: &str, tag: &str, role: Role, gender: Option<Gender>) -> Option<(&'a InflectionRule, usize)> {
        if !declinable(token) {
            return None;
        }
        self.rules.best(token, tag, role, gender)
    }

    /// Every variant in every oblique case, before deduplication.
    pub fn variants(&self, tokens: &[String], tag: &str) -> Vec<Variant> {
        if tokens.is_empty() {
            return Vec::new();
        }
        if self.rules.has_role_for(tag, &PERSON_ROLES) {
            self.person_variants(tokens, tag)
        } else if self.rules.has_role_for(tag, &[Role::Noun]) {
            self.noun_variants(tokens, tag)
        } else {
            Vec::new()
        }
    }

    fn roles(&self, tokens: &[String], tag: &str) -> Vec<Option<Role>> {
        let n = tokens.len();
        let is = |i: usize, role| self.rule(&tokens[i], tag, role, None).is_some();
        let mut roles = vec![None; n];
        match n {
            1 => {
                roles[0] = if !self.familiar.contains(&tokens[0]) && is(0, Role::Surname) {
                    Some(Role::Surname)
                } else {
                    Some(Role::First)
                };
            }
            2 => {
                roles[0] = Some(Role::First);
                roles[1] = Some(if is(1, Role::Patronymic) { Role::Patronymic } else { Role::Surname });
            }
            _ if is(n - 1, Role::Patronymic) => {
                // Surname first, as in official listings.
                roles[0] = Some(Role::Surname);
                roles[1] = Some(Role::First);
                roles[n - 1] = Some(Role::Patronymic);
            }
            _ => {
                roles[0] = Some(Role::First);
                roles[n - 1] = Some(Role::Surname);
                for (i, r) in roles.iter_mut().enumerate().take(n - 1).skip(1) {
                    if is(i, Role::Patronymic) {
                        *r = Some(Role::Patronymic);
                    }
                }
            }
        }
        roles
    }

    fn person_variants(&self, tokens: &[String], tag: &str) -> Vec<Variant> {
        let n = tokens.len();
        let roles = self.roles(tokens, tag);
        let find = |role| roles.iter().position(|r| *r == Some(role));
        let (first, patronymic, surname) = (find(Role::First), find(Role::Patronymic), find(Role::Surname));

        // Gender comes from the most telling part that carries one.
        let gender = [patronymic, surname, first]
            .into_iter()
            .flatten()
            .find_map(|i| self.rule(&tokens[i], tag, roles[i]?, None).and_then(|(r, _)| r.gender));

        let mut subsets: Vec<Vec<usize>> = vec![(0..n).collect()];
        if n > 1 {
            subsets.extend(surname.map(|s| vec![s]));
        }
        if n > 2 {
            for other in [surname, patronymic] {
                if let (Some(f), Some(o)) = (first, other) {
                    let mut v = vec![f, o];
                    v.sort_unstable();
                    subsets.push(v);
                }
            }
        }

        let mut first_names: Vec<&str> = Vec::new();
        if let Some(f) = first {
            first_names.push(&tokens[f]);
            first_names.extend(self.familiar.get(&tokens[f]).iter().map(String::as_str));
        }

        let mut out = Vec::new();
        for subset in &subsets {
            let alternatives: &[&str] = match first {
                Some(f) if subset.contains(&f) => &first_names,
                _ => &[""],
            };
            for alt in alternatives {
                let parts: Vec<(&str, Option<(&InflectionRule, usize)>)> = subset
                    .iter()
                    .map(|&i| {
                        let base = if Some(i) == first { *alt } else { tokens[i].as_str() };
                        (base, roles[i].and_then(|role| self.rule(base, tag, role, gender)))
                    })
                    .collect();
                push_cases(&parts, &mut out);
            }
        }
        out
    }

    fn noun_variants(&self, tokens: &[String], tag: &str) -> Vec<Variant> {
        let head = tokens.iter().enumerate().find_map(|(i, t)| {
            if self.rule(t, tag, Role::Adjective, None).is_some() {
                return None;
            }
            self.rule(t, tag, Role::Noun, None).map(|r| (i, r))
        });
        let Some((h, (noun, stem))) = head else {
            return Vec::new();
        };
        let mut parts: Vec<(&str, Option<(&InflectionRule, usize)>)> =
            tokens.iter().map(|t| (t.as_str(), None)).collect();
        parts[h].1 = Some((noun, stem));
        for j in (0..h).rev() {
            match self.rule(&tokens[j], tag, Role::Adjective, noun.gender) {
                Some(r) => parts[j].1 = Some(r),
                None => break,
            }
        }
        let mut out = Vec::new();
        push_cases(&parts, &mut out);
        out
    }

    /// Distinct inflected token sequences for one name, excluding the name
    /// itself.
    pub fn inflect_tokens(&self, tokens: &[String], tag: &str) -> BTreeSet<Vec<String>> {
        self.variants(tokens, tag)
            .into_iter()
            .map(|v| v.forms())
            .filter(|f| f.as_slice() != tokens)
            .collect()
    }

    /// Inflected entries for one Russian entry; other languages yield none.
    pub fn inflect_name(&self, entry: &GazetteerEntry) -> Vec<GazetteerEntry> {
        if entry.language.as_str() != "ru" {
            return Vec::new();
        }
        self.inflect_tokens(&entry.tokens, &entry.tag)
            .into_iter()
            .map(|tokens| GazetteerEntry::new(tokens, &entry.tag, Source::Inflected, entry.language))
            .collect()
    }

    /// Inflected groups for every Russian canonical and alias group.
    pub fn inflect_gazetteer(&self, gazetteer: &Gazetteer) -> Gazetteer {
        let ru = Language::new("ru").expect("valid code");
        let mut out = Gazetteer::new();
        for (key, entries) in gazetteer.groups() {
            if key.language != ru || key.source == Source::Inflected {
                continue;
            }
            let target = GroupKey::new(ru, &key.tag, Source::Inflected);
            out.ensure_group(target.clone());
            let produced: Vec<BTreeSet<Vec<String>>> = entries
                .par_iter()
                .map(|tokens| self.inflect_tokens(tokens, &key.tag))
                .collect();
            for set in produced {
                for tokens in set {
                    out.insert_tokens(target.clone(), tokens);
                }
            }
        }
        out
    }
}

fn push_cases(parts: &[(&str, Option<(&InflectionRule, usize)>)], out: &mut Vec<Variant>) {
    if parts.iter().all(|(_, r)| r.is_none()) {
        return;
    }
    for case in Case::OBLIQUE {
        let tokens = parts
            .iter()
            .map(|&(base, rule)| match rule {
                Some((r, stem)) => InflectedToken {
                    base: base.to_string(),
                    stem_len: stem,
                    form: r.apply(base, stem, case),
                    rule: Some(r.name.clone()),
                },
                None => InflectedToken {
                    base: base.to_string(),
                    stem_len: base.len(),
                    form: base.to_string(),
                    rule: None,
                },
            })
            .collect();
        out.push(Variant { case, tokens });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::split_name;

    fn with_shipped<T>(f: impl FnOnce(&Inflector) -> T) -> T {
        let (r, fam) = (RuleSet::shipped(), FamiliarForms::shipped());
        f(&Inflector::new(&r, &fam))
    }

    fn forms(name: &str, tag: &str) -> Vec<String> {
        with_shipped(|inf| inf.inflect_tokens(&split_name(name), tag).into_iter().map(|t| t.join(" ")).collect())
    }

    #[test]
    fn single_surname_declines_in_five_cases() {
        let per_case: Vec<(Case, String)> = with_shipped(|inf| {
            inf.variants(&split_name("Путин"), "PER")
                .into_iter()
                .map(|v| (v.case, v.forms().join(" ")))
                .collect()
        });
        assert_eq!(
            per_case,
            vec![
                (Case::Genitive, "Путина".to_string()),
                (Case::Dative, "Путину".to_string()),
                (Case::Accusative, "Путина".to_string()),
                (Case::Instrumental, "Путиным".to_string()),
                (Case::Prepositional, "Путине".to_string()),
            ]
        );
        // Genitive and accusative coincide for animate nouns.
        assert_eq!(forms("Путин", "PER"), vec!["Путина", "Путине", "Путину", "Путиным"]);
    }

    #[test]
    fn feminine_names_agree() {
        let f = forms("Анна Андреевна Ахматова", "PER");
        assert!(f.contains(&"Анны Андреевны Ахматовой".to_string()));
        assert!(f.contains(&"Анну Ахматову".to_string()));
        assert!(f.contains(&"Аней Андреевной".to_string()));
        assert!(f.contains(&"Ахматовой".to_string()));
    }

    #[test]
    fn surname_first_order_is_kept() {
        let f = forms("Толстой Лев Николаевич", "PER");
        assert!(f.contains(&"Толстого Льва Николаевича".to_string()));
        assert!(f.contains(&"Толстым Львом".to_string()));
        assert!(f.contains(&"Льве Николаевиче".to_string()));
        assert!(f.contains(&"Толстым".to_string()));
    }

    #[test]
    fn places_and_organisations() {
        assert_eq!(forms("Москва", "GPE"), vec!["Москве", "Москвой", "Москву", "Москвы"]);
        let f = forms("Российская Федерация", "GPE");
        assert_eq!(f, vec!["Российской Федерацией", "Российской Федерации", "Российскую Федерацию"]);
        // Inanimate masculine accusative equals the nominative and is dropped.
        assert_eq!(forms("Лондон", "GPE"), vec!["Лондона", "Лондоне", "Лондоном", "Лондону"]);
        let f = forms("Московский государственный университет", "ORG");
        assert!(f.contains(&"Московского государственного университета".to_string()));
        assert!(f.contains(&"Московским государственным университетом".to_string()));
    }

    #[test]
    fn indeclinable_and_out_of_scope() {
        assert!(forms("Шойгу", "PER").is_empty());
        assert!(forms("МГУ", "ORG").is_empty());
        assert!(forms("London", "GPE").is_empty());
        assert!(forms("Москва", "CHEM").is_empty());
        let en = GazetteerEntry::from_name("Путин", "PER", Source::Canonical, Language::new("en").unwrap());
        assert!(with_shipped(|inf| inf.inflect_name(&en)).is_empty());
    }
}
