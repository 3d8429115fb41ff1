use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::slice::ParallelSliceMut;

use crate::model::{Gazetteer, Language, Sentence, Source, TokenMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CasePolicy {
    #[default]
    Sensitive,
    Fold,
}

impl FromStr for CasePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sensitive" => Ok(CasePolicy::Sensitive),
            "fold" => Ok(CasePolicy::Fold),
            other => Err(format!("unknown case policy `{other}` (expected sensitive|fold)")),
        }
    }
}

impl fmt::Display for CasePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CasePolicy::Sensitive => "sensitive",
            CasePolicy::Fold => "fold",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Suffix {
    entry: u32,
    offset: u32,
}

/// Immutable multi-pattern index over the entries of one (language, type)
/// group.
///
/// Entries are interned to token ids and stored flat. Ids are assigned in
/// string order, so entry ids sorted by their id sequences are also sorted
/// lexicographically by surface. Every (entry, offset) suffix is kept in a
/// suffix array ordered by (suffix tokens, offset, entry); an n-gram's
/// occurrences inside entries form one contiguous range of it, and the
/// entries starting with an n-gram form one contiguous id range.
#[derive(Debug, Clone)]
pub struct MatchIndex {
    tag: String,
    mode: TokenMode,
    case: CasePolicy,
    vocab: HashMap<Box<str>, u32>,
    tokens: Vec<u32>,
    starts: Vec<u32>,
    suffixes: Vec<Suffix>,
    max_len: usize,
}

/// Statistics reported after a build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexStats {
    pub entries: usize,
    pub vocabulary: usize,
    pub suffixes: usize,
    pub memory_bytes: usize,
}

pub(crate) fn normalize_token(token: &str, case: CasePolicy) -> String {
    match case {
        CasePolicy::Sensitive => token.to_string(),
        CasePolicy::Fold => token.to_lowercase(),
    }
}

/// Splits an entry into the units the index stores: words in word mode,
/// characters (whitespace dropped) in character mode.
fn entry_units<'a, I>(tokens: I, mode: TokenMode, case: CasePolicy) -> Vec<String>
where
    I: IntoIterator<Item = &'a str>,
{
    match mode {
        TokenMode::Word => tokens.into_iter().map(|t| normalize_token(t, case)).collect(),
        TokenMode::Character => tokens
            .into_iter()
            .flat_map(str::chars)
            .filter(|c| !c.is_whitespace())
            .map(|c| normalize_token(c.encode_utf8(&mut [0; 4]), case))
            .collect(),
    }
}

impl MatchIndex {
    /// Indexes the union of the selected sources of one (language, type)
    /// group. A missing group yields an empty index.
    pub fn build(
        gazetteer: &Gazetteer,
        language: Language,
        tag: &str,
        sources: &[Source],
        mode: TokenMode,
        case: CasePolicy,
    ) -> Self {
        let entries = gazetteer.union(language, tag, sources);
        Self::from_entries(tag, entries.iter().map(|e| e.iter().map(String::as_str)), mode, case)
    }

    /// Builds an index from token sequences. Empty sequences are skipped and
    /// duplicates (after case policy) collapse.
    pub fn from_entries<'a, E, T>(tag: &str, entries: E, mode: TokenMode, case: CasePolicy) -> Self
    where
        E: IntoIterator<Item = T>,
        T: IntoIterator<Item = &'a str>,
    {
        let mut vocab: HashMap<Box<str>, u32> = HashMap::new();
        let mut flat: Vec<u32> = Vec::new();
        let mut starts: Vec<u32> = vec![0];
        for entry in entries {
            let units = entry_units(entry, mode, case);
            if units.is_empty() {
                continue;
            }
            for unit in units {
                let next = vocab.len() as u32;
                let id = *vocab.entry(unit.into_boxed_str()).or_insert(next);
                flat.push(id);
            }
            starts.push(flat.len() as u32);
        }

        // Re-number ids by string rank.
        let mut by_string: Vec<(&str, u32)> = vocab.iter().map(|(k, &v)| (&**k, v)).collect();
        by_string.sort_unstable();
        let mut rank = vec![0u32; by_string.len()];
        for (r, &(_, old)) in by_string.iter().enumerate() {
            rank[old as usize] = r as u32;
        }
        drop(by_string);
        for v in vocab.values_mut() {
            *v = rank[*v as usize];
        }
        for t in &mut flat {
            *t = rank[*t as usize];
        }
        drop(rank);

        // Sort entries, drop duplicates, and lay them out in sorted order.
        let n_raw = starts.len() - 1;
        let slice_of = |i: usize| &flat[starts[i] as usize..starts[i + 1] as usize];
        let mut order: Vec<u32> = (0..n_raw as u32).collect();
        order.par_sort_unstable_by(|&a, &b| slice_of(a as usize).cmp(slice_of(b as usize)));
        order.dedup_by(|a, b| slice_of(*a as usize) == slice_of(*b as usize));
        let mut tokens = Vec::with_capacity(flat.len());
        let mut sorted_starts = Vec::with_capacity(order.len() + 1);
        sorted_starts.push(0u32);
        for &i in &order {
            tokens.extend_from_slice(slice_of(i as usize));
            sorted_starts.push(tokens.len() as u32);
        }
        drop(order);
        drop(flat);
        tokens.shrink_to_fit();
        let starts = sorted_starts;

        let mut suffixes = Vec::with_capacity(tokens.len());
        let mut max_len = 0;
        for e in 0..starts.len() - 1 {
            let len = (starts[e + 1] - starts[e]) as usize;
            max_len = max_len.max(len);
            for offset in 0..len {
                suffixes.push(Suffix {
                    entry: e as u32,
                    offset: offset as u32,
                });
            }
        }
        let suffix_of = |s: &Suffix| &tokens[(starts[s.entry as usize] + s.offset) as usize..starts[s.entry as usize + 1] as usize];
        suffixes.par_sort_unstable_by(|a, b| {
            suffix_of(a)
                .cmp(suffix_of(b))
                .then(a.offset.cmp(&b.offset))
                .then(a.entry.cmp(&b.entry))
        });

        vocab.shrink_to_fit();
        Self {
            tag: tag.to_string(),
            mode,
            case,
            vocab,
            tokens,
            starts,
            suffixes,
            max_len,
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn mode(&self) -> TokenMode {
        self.mode
    }

    pub fn case_policy(&self) -> CasePolicy {
        self.case
    }

    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Length in units of the longest entry.
    pub fn max_entry_len(&self) -> usize {
        self.max_len
    }

    /// Approximate heap footprint of the built index.
    pub fn memory_bytes(&self) -> usize {
        let vocab_keys: usize = self.vocab.keys().map(|k| k.len()).sum();
        // hashbrown stores (Box<str>, u32) slots plus one control byte each.
        let slot = std::mem::size_of::<(Box<str>, u32)>() + 1;
        vocab_keys
            + self.vocab.capacity() * slot
            + self.tokens.capacity() * 4
            + self.starts.capacity() * 4
            + self.suffixes.capacity() * std::mem::size_of::<Suffix>()
            + self.tag.capacity()
    }

    pub fn stats(&self) -> IndexStats {
        IndexStats {
            entries: self.len(),
            vocabulary: self.vocab.len(),
            suffixes: self.suffixes.len(),
            memory_bytes: self.memory_bytes(),
        }
    }

    fn entry(&self, e: u32) -> &[u32] {
        &self.tokens[self.starts[e as usize] as usize..self.starts[e as usize + 1] as usize]
    }

    fn suffix_token(&self, s: &Suffix, depth: usize) -> Option<u32> {
        self.entry(s.entry).get(s.offset as usize + depth).copied()
    }

    /// Maps a sentence to token ids; `None` marks units absent from the
    /// vocabulary.
    pub(crate) fn encode_sentence(&self, sentence: &Sentence) -> Vec<Option<u32>> {
        assert_eq!(
            sentence.mode, self.mode,
            "sentence mode {} does not match index mode {}",
            sentence.mode, self.mode
        );
        sentence
            .tokens
            .iter()
            .map(|t| self.lookup_unit(&t.surface))
            .collect()
    }

    fn lookup_unit(&self, unit: &str) -> Option<u32> {
        match self.case {
            CasePolicy::Sensitive => self.vocab.get(unit).copied(),
            CasePolicy::Fold => self.vocab.get(unit.to_lowercase().as_str()).copied(),
        }
    }

    /// Exact lookup of a complete entry.
    pub fn contains<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        let units = entry_units(tokens.iter().map(AsRef::as_ref), self.mode, self.case);
        let Some(ids) = units.iter().map(|u| self.vocab.get(u.as_str()).copied()).collect::<Option<Vec<_>>>() else {
            return false;
        };
        let range = self.prefix_range(&ids);
        !range.is_empty() && self.entry(range.start as u32).len() == ids.len()
    }

    /// Entries whose first tokens equal `ids`, as a contiguous id range.
    fn prefix_range(&self, ids: &[u32]) -> Range<usize> {
        let mut range = 0..self.len();
        for (depth, &id) in ids.iter().enumerate() {
            range = narrow(range, id, |e| self.entry(e as u32).get(depth).copied());
            if range.is_empty() {
                break;
            }
        }
        range
    }

    /// Per-sentence occurrence counts used by the matchers.
    pub(crate) fn occurrence_table(&self, ids: &[Option<u32>]) -> OccurrenceTable {
        let len = ids.len();
        let stride = self.max_len + 3;
        let mut table = OccurrenceTable {
            stride,
            len,
            suffix_counts: vec![0; len * stride],
            prefix_counts: vec![0; len * stride],
            full: vec![false; len * stride],
        };
        for s in 0..len {
            let mut suffix_range = 0..self.suffixes.len();
            let mut prefix_range = 0..self.len();
            for depth in 0..self.max_len.min(len - s) {
                let Some(id) = ids[s + depth] else { break };
                let n = depth + 1;
                if !suffix_range.is_empty() {
                    suffix_range = narrow(suffix_range, id, |i| self.suffix_token(&self.suffixes[i], depth));
                    table.suffix_counts[s * stride + n] = suffix_range.len() as u32;
                }
                if !prefix_range.is_empty() {
                    prefix_range = narrow(prefix_range, id, |e| self.entry(e as u32).get(depth).copied());
                    table.prefix_counts[s * stride + n] = prefix_range.len() as u32;
                    table.full[s * stride + n] =
                        !prefix_range.is_empty() && self.entry(prefix_range.start as u32).len() == n;
                }
                if suffix_range.is_empty() {
                    break;
                }
            }
        }
        table
    }
}

/// Within `range`, whose items share all tokens before the current depth and
/// are sorted by the token at that depth (absent first), returns the subrange
/// whose token equals `id`.
fn narrow(range: Range<usize>, id: u32, key: impl Fn(usize) -> Option<u32>) -> Range<usize> {
    let target = Some(id);
    let base = range.start;
    let lo = base + partition_point(range.len(), |i| key(base + i) < target);
    let hi = base + partition_point(range.len(), |i| key(base + i) <= target);
    lo..hi
}

fn partition_point(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Counts for every sentence n-gram `(start, n)`:
/// occurrences inside entries, entries having it as a prefix, and whether
/// it is a complete entry. Out-of-range cells read as zero.
pub(crate) struct OccurrenceTable {
    stride: usize,
    len: usize,
    suffix_counts: Vec<u32>,
    prefix_counts: Vec<u32>,
    full: Vec<bool>,
}

impl OccurrenceTable {
    fn cell(&self, s: usize, n: usize) -> Option<usize> {
        (s < self.len && n < self.stride && s + n <= self.len).then(|| s * self.stride + n)
    }

    pub(crate) fn occurrences(&self, s: usize, n: usize) -> u32 {
        self.cell(s, n).map_or(0, |c| self.suffix_counts[c])
    }

    pub(crate) fn prefixed(&self, s: usize, n: usize) -> u32 {
        self.cell(s, n).map_or(0, |c| self.prefix_counts[c])
    }

    pub(crate) fn is_full(&self, s: usize, n: usize) -> bool {
        self.cell(s, n).is_some_and(|c| self.full[c])
    }

    pub(crate) fn max_n(&self) -> usize {
        self.stride - 3
    }
}
