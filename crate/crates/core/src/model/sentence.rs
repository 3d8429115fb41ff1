use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::label::{validate_bio_sequence, BioLabel, BioViolation};

/// How a sentence is tokenized: whitespace separated words, or one token
/// per character (Chinese-style text).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum TokenMode {
    #[default]
    Word,
    Character,
}

impl FromStr for TokenMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word" => Ok(TokenMode::Word),
            "char" | "character" => Ok(TokenMode::Character),
            other => Err(format!("unknown token mode `{other}` (expected word|char)")),
        }
    }
}

impl fmt::Display for TokenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TokenMode::Word => "word",
            TokenMode::Character => "char",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenError {
    #[error("empty token")]
    Empty,
    #[error("token `{0}` contains whitespace")]
    Whitespace(String),
    #[error("token `{0}` is not a single character")]
    NotSingleChar(String),
}

pub fn check_surface(surface: &str, mode: TokenMode) -> Result<(), TokenError> {
    if surface.is_empty() {
        return Err(TokenError::Empty);
    }
    if surface.chars().any(char::is_whitespace) {
        return Err(TokenError::Whitespace(surface.to_string()));
    }
    if mode == TokenMode::Character && surface.chars().nth(1).is_some() {
        return Err(TokenError::NotSingleChar(surface.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub gold: BioLabel,
}

impl Token {
    pub fn new(surface: impl Into<String>, gold: BioLabel) -> Self {
        Self {
            surface: surface.into(),
            gold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub mode: TokenMode,
}

impl Sentence {
    /// Builds a sentence after checking every token surface against the
    /// mode.
    pub fn new(tokens: Vec<Token>, mode: TokenMode) -> Result<Self, TokenError> {
        for t in &tokens {
            check_surface(&t.surface, mode)?;
        }
        Ok(Self { tokens, mode })
    }

    /// Word-mode sentence from parallel surface and label strings. Panics on
    /// malformed input; meant for fixtures.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        let tokens = pairs
            .iter()
            .map(|(s, l)| Token::new(*s, l.parse().expect("valid label")))
            .collect();
        Self::new(tokens, TokenMode::Word).expect("valid tokens")
    }

    /// Sentence with every gold label `O`.
    pub fn unlabeled<S: AsRef<str>>(surfaces: &[S], mode: TokenMode) -> Result<Self, TokenError> {
        let tokens = surfaces
            .iter()
            .map(|s| Token::new(s.as_ref(), BioLabel::Outside))
            .collect();
        Self::new(tokens, mode)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }

    pub fn gold_labels(&self) -> Vec<BioLabel> {
        self.tokens.iter().map(|t| t.gold.clone()).collect()
    }

    pub fn violations(&self) -> Vec<BioViolation> {
        validate_bio_sequence(&self.gold_labels())
    }

    /// Joins a token range the way surfaces are compared against gazetteer
    /// entries: single spaces in word mode, plain concatenation in character
    /// mode.
    pub fn join_range(&self, start: usize, end: usize) -> String {
        let sep = match self.mode {
            TokenMode::Word => " ",
            TokenMode::Character => "",
        };
        self.tokens[start..end]
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_checks() {
        assert_eq!(check_surface("", TokenMode::Word), Err(TokenError::Empty));
        assert!(matches!(check_surface("a b", TokenMode::Word), Err(TokenError::Whitespace(_))));
        assert!(check_surface("香港", TokenMode::Word).is_ok());
        assert!(matches!(
            check_surface("香港", TokenMode::Character),
            Err(TokenError::NotSingleChar(_))
        ));
        assert!(check_surface("香", TokenMode::Character).is_ok());
    }

    #[test]
    fn join_depends_on_mode() {
        let s = Sentence::unlabeled(&["Hong", "Kong"], TokenMode::Word).unwrap();
        assert_eq!(s.join_range(0, 2), "Hong Kong");
        let c = Sentence::unlabeled(&["香", "港"], TokenMode::Character).unwrap();
        assert_eq!(c.join_range(0, 2), "香港");
    }
}
