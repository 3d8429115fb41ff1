use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

/// One entity type of the tag set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagType {
    pub code: String,
    pub core: bool,
    pub parent: Option<String>,
    pub description: String,
}

impl TagType {
    pub fn new(code: &str, core: bool, parent: Option<&str>, description: &str) -> Self {
        Self {
            code: code.to_string(),
            core,
            parent: parent.map(str::to_string),
            description: description.to_string(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("duplicate tag code `{0}`")]
    Duplicate(String),
    #[error("tag `{code}` names unknown parent `{parent}`")]
    UnknownParent { code: String, parent: String },
    #[error("invalid tag code `{0}`")]
    InvalidCode(String),
    #[error("registry line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("failed to read registry: {0}")]
    Io(String),
}

/// Ordered set of tag types. The order fixes the feature column order of
/// every downstream output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagRegistry {
    types: Vec<TagType>,
    by_code: HashMap<String, usize>,
}

const DEFAULT_TYPES: &[(&str, bool, Option<&str>, &str)] = &[
    ("PER", true, None, "Person"),
    ("ORG", true, None, "Organization"),
    ("COMM", false, Some("ORG"), "Commercial Org."),
    ("POL", false, Some("ORG"), "Political Organization"),
    ("GPE", true, None, "Geo-political Entity"),
    ("LOC", true, None, "Natural Location"),
    ("FAC", false, None, "Facility"),
    ("GOVT", false, Some("FAC"), "Government Building"),
    ("AIR", false, Some("FAC"), "Airport"),
    ("EVNT", false, None, "Named Event"),
    ("VEH", false, None, "Vehicle"),
    ("COMP", false, None, "Computer Hard/Software"),
    ("MIL", false, None, "Military Equip."),
    ("MIL_G", false, Some("MIL"), "Generic Military Equip."),
    ("MIL_N", false, Some("MIL"), "Named Military Equip."),
    ("CHEM", false, None, "Chemical"),
    ("MISC", false, None, "Other named entity"),
];

pub(crate) fn valid_code(code: &str) -> bool {
    !code.is_empty() && !code.chars().any(char::is_whitespace) && !code.contains(',')
}

impl TagRegistry {
    /// Builds a registry, checking code uniqueness and parent references.
    pub fn new(types: Vec<TagType>) -> Result<Self, RegistryError> {
        let mut by_code = HashMap::with_capacity(types.len());
        for (i, t) in types.iter().enumerate() {
            if !valid_code(&t.code) {
                return Err(RegistryError::InvalidCode(t.code.clone()));
            }
            if by_code.insert(t.code.clone(), i).is_some() {
                return Err(RegistryError::Duplicate(t.code.clone()));
            }
        }
        for t in &types {
            if let Some(parent) = &t.parent {
                if !by_code.contains_key(parent) {
                    return Err(RegistryError::UnknownParent {
                        code: t.code.clone(),
                        parent: parent.clone(),
                    });
                }
            }
        }
        Ok(Self { types, by_code })
    }

    /// The seventeen types of the default tag set, core types first within
    /// their families.
    pub fn default_types() -> Self {
        let types = DEFAULT_TYPES
            .iter()
            .map(|&(code, core, parent, desc)| TagType::new(code, core, parent, desc))
            .collect();
        Self::new(types).expect("default registry is well formed")
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn types(&self) -> &[TagType] {
        &self.types
    }

    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.types.iter().map(|t| t.code.as_str())
    }

    pub fn get(&self, code: &str) -> Option<&TagType> {
        self.by_code.get(code).map(|&i| &self.types[i])
    }

    pub fn position(&self, code: &str) -> Option<usize> {
        self.by_code.get(code).copied()
    }

    pub fn contains(&self, code: &str) -> bool {
        self.by_code.contains_key(code)
    }

    pub fn core_types(&self) -> impl Iterator<Item = &TagType> {
        self.types.iter().filter(|t| t.core)
    }

    /// Parses the tab separated registry file:
    /// `code<TAB>core|ext<TAB>parent-or-"-"<TAB>description`.
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn read<R: BufRead>(reader: R) -> Result<Self, RegistryError> {
        let mut types = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| RegistryError::Io(e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.splitn(4, '\t').collect();
            if fields.len() < 3 {
                return Err(RegistryError::Syntax {
                    line: line_no,
                    message: format!("expected at least 3 tab separated fields, got {}", fields.len()),
                });
            }
            let core = match fields[1] {
                "core" => true,
                "ext" => false,
                other => {
                    return Err(RegistryError::Syntax {
                        line: line_no,
                        message: format!("second field must be `core` or `ext`, got `{other}`"),
                    })
                }
            };
            let parent = match fields[2] {
                "-" => None,
                p => Some(p),
            };
            let description = fields.get(3).copied().unwrap_or("");
            types.push(TagType::new(fields[0], core, parent, description));
        }
        Self::new(types)
    }

    /// Renders the registry in the format accepted by [`TagRegistry::read`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for t in &self.types {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                t.code,
                if t.core { "core" } else { "ext" },
                t.parent.as_deref().unwrap_or("-"),
                t.description
            );
        }
        out
    }
}

impl Default for TagRegistry {
    fn default() -> Self {
        Self::default_types()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_matches_tag_table() {
        let reg = TagRegistry::default_types();
        assert_eq!(reg.len(), 17);
        let core: Vec<_> = reg.core_types().map(|t| t.code.as_str()).collect();
        assert_eq!(core, ["PER", "ORG", "GPE", "LOC"]);
        let parents: Vec<_> = reg
            .types()
            .iter()
            .filter_map(|t| t.parent.as_deref().map(|p| (t.code.as_str(), p)))
            .collect();
        assert_eq!(
            parents,
            [
                ("COMM", "ORG"),
                ("POL", "ORG"),
                ("GOVT", "FAC"),
                ("AIR", "FAC"),
                ("MIL_G", "MIL"),
                ("MIL_N", "MIL")
            ]
        );
    }

    #[test]
    fn config_round_trip_preserves_order() {
        let reg = TagRegistry::default_types();
        let text = reg.to_config_string();
        let back = TagRegistry::read(text.as_bytes()).unwrap();
        assert_eq!(back, reg);
        assert_eq!(back.to_config_string(), text);
    }

    #[test]
    fn rejects_duplicates_and_dangling_parents() {
        let dup = "PER\tcore\t-\tPerson\nPER\text\t-\tagain\n";
        assert_eq!(
            TagRegistry::read(dup.as_bytes()),
            Err(RegistryError::Duplicate("PER".into()))
        );
        let dangling = "COMM\text\tORG\tCommercial\n";
        assert!(matches!(
            TagRegistry::read(dangling.as_bytes()),
            Err(RegistryError::UnknownParent { .. })
        ));
        let bad_kind = "PER\tmain\t-\tPerson\n";
        assert!(matches!(
            TagRegistry::read(bad_kind.as_bytes()),
            Err(RegistryError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn custom_registry_with_comments() {
        let text = "# OntoNotes subset\nPERSON\tcore\t-\tPeople\n\nNORP\text\t-\tGroups\n";
        let reg = TagRegistry::read(text.as_bytes()).unwrap();
        assert_eq!(reg.codes().collect::<Vec<_>>(), ["PERSON", "NORP"]);
        assert_eq!(reg.position("NORP"), Some(1));
    }
}
