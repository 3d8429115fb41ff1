use crate::corpus::Document;

use super::{check_alignment, percent, EvalError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AgreementReport {
    pub tokens: usize,
    /// Tokens with identical labels.
    pub exact: usize,
    /// Tokens on which both annotations agree whether the token is part of a
    /// name.
    pub boundary: usize,
}

impl AgreementReport {
    pub fn exact_rate(&self) -> f64 {
        percent(self.exact, self.tokens)
    }

    pub fn boundary_rate(&self) -> f64 {
        percent(self.boundary, self.tokens)
    }
}

/// Token-level agreement between two annotations of the same text.
pub fn token_agreement(a: &Document, b: &Document) -> Result<AgreementReport, EvalError> {
    check_alignment(a, b)?;
    let mut r = AgreementReport::default();
    for (x, y) in a.sentences.iter().zip(&b.sentences) {
        for (p, q) in x.tokens.iter().zip(&y.tokens) {
            r.tokens += 1;
            r.exact += usize::from(p.gold == q.gold);
            r.boundary += usize::from(p.gold.is_outside() == q.gold.is_outside());
        }
    }
    Ok(r)
}
