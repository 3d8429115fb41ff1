//! Test-only reference implementations, kept independent of the library's
//! matching code paths.

#![allow(dead_code)]

use gazkit_core::corpus::Document;
use gazkit_core::{BioKind, BioLabel, Gazetteer, GazetteerEntry, Language, Sentence, Source, Token, TokenMode};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A span as (start, end, copied tags).
pub type OracleSpan = (usize, usize, Vec<BioKind>);

fn greedy(len: usize, mut cands: Vec<(usize, usize, BioKind, Vec<usize>)>, covered: &mut [bool]) -> Vec<OracleSpan> {
    // cands: (start, n, first tag, sort key tail); priority is
    // n desc, start asc, then the tail ascending.
    cands.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)).then(a.3.cmp(&b.3)));
    let mut out = Vec::new();
    for (s, n, first, _) in cands {
        assert!(s + n <= len);
        if covered[s..s + n].iter().any(|&c| c) {
            continue;
        }
        for c in &mut covered[s..s + n] {
            *c = true;
        }
        let mut tags = vec![BioKind::I; n];
        tags[0] = first;
        out.push((s, s + n, tags));
    }
    out.sort_by_key(|x| x.0);
    out
}

/// Exhaustive full-match selection: every (n-gram, entry) pair.
pub fn oracle_full(sentence: &[String], entries: &[Vec<String>]) -> Vec<OracleSpan> {
    let len = sentence.len();
    let mut cands = Vec::new();
    for s in 0..len {
        for n in 1..=len - s {
            if entries.iter().any(|e| e.as_slice() == &sentence[s..s + n]) {
                cands.push((s, n, BioKind::B, vec![]));
            }
        }
    }
    greedy(len, cands, &mut vec![false; len])
}

/// Exhaustive partial-match selection over every (n-gram, entry, offset)
/// triple, excluding candidates touching `blocked` tokens.
pub fn oracle_partial(sentence: &[String], entries: &[Vec<String>], min_len: usize, blocked: &[bool]) -> Vec<OracleSpan> {
    let len = sentence.len();
    let mut sorted: Vec<&Vec<String>> = entries.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut cands = Vec::new();
    for s in 0..len {
        for n in min_len.max(1)..=len - s {
            if blocked[s..s + n].iter().any(|&b| b) {
                continue;
            }
            for (rank, e) in sorted.iter().enumerate() {
                for o in 0..e.len() {
                    if o + n > e.len() || e[o..o + n] != sentence[s..s + n] {
                        continue;
                    }
                    if o == 0 && n == e.len() {
                        continue;
                    }
                    let left = s > 0 && o > 0 && sentence[s - 1] == e[o - 1];
                    let right = s + n < len && o + n < e.len() && sentence[s + n] == e[o + n];
                    if left || right {
                        continue;
                    }
                    let first = if o == 0 { BioKind::B } else { BioKind::I };
                    cands.push((s, n, first, vec![usize::from(o != 0), rank]));
                }
            }
        }
    }
    greedy(len, cands, &mut vec![false; len])
}

/// Full matches, then partial matches on the remaining tokens.
pub fn oracle_row(sentence: &[String], entries: &[Vec<String>], min_len: usize, partial: bool) -> Vec<BioKind> {
    let len = sentence.len();
    let mut row = vec![BioKind::O; len];
    let full = oracle_full(sentence, entries);
    let mut blocked = vec![false; len];
    for (s, e, tags) in &full {
        row[*s..*e].copy_from_slice(tags);
        blocked[*s..*e].iter_mut().for_each(|b| *b = true);
    }
    if partial {
        for (s, e, tags) in oracle_partial(sentence, entries, min_len, &blocked) {
            row[s..e].copy_from_slice(&tags);
        }
    }
    row
}

/// Random matching instance: small vocabulary so that matches are common.
pub struct Instance {
    pub sentence: Vec<String>,
    pub entries: Vec<Vec<String>>,
}

pub fn random_instance(rng: &mut StdRng, max_sentence: usize, max_vocab: usize, max_entries: usize, max_entry_len: usize) -> Instance {
    let vocab = rng.random_range(1..=max_vocab);
    let word = |rng: &mut StdRng| format!("w{}", rng.random_range(0..vocab));
    let len = rng.random_range(1..=max_sentence);
    let sentence: Vec<String> = (0..len).map(|_| word(rng)).collect();
    let n_entries = rng.random_range(0..=max_entries);
    let mut entries = Vec::new();
    for _ in 0..n_entries {
        // Half of the entries are cut from the sentence to force overlaps.
        let e_len = rng.random_range(1..=max_entry_len);
        let entry: Vec<String> = if rng.random_bool(0.5) && len >= 1 {
            let start = rng.random_range(0..len);
            let mut e: Vec<String> = sentence[start..(start + e_len).min(len)].to_vec();
            if rng.random_bool(0.5) {
                e.insert(0, word(rng));
            }
            e.truncate(max_entry_len);
            e
        } else {
            (0..e_len).map(|_| word(rng)).collect()
        };
        entries.push(entry);
    }
    Instance { sentence, entries }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub const SYNTH_TAGS: [&str; 4] = ["PER", "ORG", "GPE", "LOC"];

/// A corpus of `sentences` word-mode sentences mixing filler words with
/// entities of the four core types, drawn from a small name pool so that
/// surfaces repeat.
pub fn synthetic_corpus(rng: &mut StdRng, sentences: usize) -> Document {
    let filler = ["the", "a", "met", "in", "said", "of", "and", "visited", ",", "."];
    let mut out = Vec::with_capacity(sentences);
    for _ in 0..sentences {
        let mut tokens = Vec::new();
        let len = rng.random_range(3..15);
        while tokens.len() < len {
            if rng.random_bool(0.3) {
                let tag = SYNTH_TAGS[rng.random_range(0..SYNTH_TAGS.len())];
                let name = rng.random_range(0..8);
                let width = 1 + name % 3;
                for k in 0..width {
                    let label = if k == 0 { BioLabel::Begin(tag.into()) } else { BioLabel::Inside(tag.into()) };
                    tokens.push(Token::new(format!("{tag}{name}w{k}"), label));
                }
            } else {
                tokens.push(Token::new(filler[rng.random_range(0..filler.len())], BioLabel::Outside));
            }
        }
        out.push(Sentence::new(tokens, TokenMode::Word).unwrap());
    }
    Document::new("synthetic", out)
}

/// Replacement gazetteer with `per_type` entries of one to three tokens for
/// each core type.
pub fn synthetic_gazetteer(language: Language, per_type: usize) -> Gazetteer {
    let mut g = Gazetteer::new();
    for tag in SYNTH_TAGS {
        for i in 0..per_type {
            let name: Vec<String> = (0..=i % 3).map(|k| format!("g{tag}{i}x{k}")).collect();
            g.insert(GazetteerEntry::new(name, tag, Source::Canonical, language));
        }
    }
    g
}
