//! Coverage statistics, entity-level scoring, token agreement and
//! significance testing.

mod agreement;
mod coverage;
mod score;
mod table;
mod ttest;

pub use agreement::{token_agreement, AgreementReport};
pub use coverage::{coverage, CoverageOptions, CoverageReport, CoverageRow};
pub use score::{score, Counts, ScoreReport};
pub use table::Table;
pub use ttest::{parse_samples, welch_t_test, TTest};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("documents differ in sentence count: {left} vs {right}")]
    SentenceCount { left: usize, right: usize },
    #[error("sentence {sentence}: token count differs: {left} vs {right}")]
    TokenCount {
        sentence: usize,
        left: usize,
        right: usize,
    },
    #[error("sentence {sentence}, token {token}: surface `{left}` vs `{right}`")]
    Surface {
        sentence: usize,
        token: usize,
        left: String,
        right: String,
    },
    #[error("line {line}: `{text}` is not a number")]
    Sample { line: usize, text: String },
}

/// Checks that two documents carry the same token stream and returns the
/// first divergence otherwise.
pub fn check_alignment(a: &crate::corpus::Document, b: &crate::corpus::Document) -> Result<(), EvalError> {
    if a.sentences.len() != b.sentences.len() {
        // Report the first sentence that differs before falling back to the
        // count mismatch.
        for (i, (x, y)) in a.sentences.iter().zip(&b.sentences).enumerate() {
            check_sentence(i, x, y)?;
        }
        return Err(EvalError::SentenceCount {
            left: a.sentences.len(),
            right: b.sentences.len(),
        });
    }
    for (i, (x, y)) in a.sentences.iter().zip(&b.sentences).enumerate() {
        check_sentence(i, x, y)?;
    }
    Ok(())
}

fn check_sentence(i: usize, x: &crate::Sentence, y: &crate::Sentence) -> Result<(), EvalError> {
    for (j, (p, q)) in x.tokens.iter().zip(&y.tokens).enumerate() {
        if p.surface != q.surface {
            return Err(EvalError::Surface {
                sentence: i,
                token: j,
                left: p.surface.clone(),
                right: q.surface.clone(),
            });
        }
    }
    if x.len() != y.len() {
        return Err(EvalError::TokenCount {
            sentence: i,
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// `100 * num / den`, with `0/0 = 0`.
pub(crate) fn percent(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}
