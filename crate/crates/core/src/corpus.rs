//! Reading and writing BIO corpora, feature-augmented corpora and gazetteer
//! name lists.
//!
//! BIO input is one token per line, `surface<SEP>label`, where `SEP` is any
//! run of tabs or spaces; sentences are separated by blank lines. Extra
//! columns between the surface and the label are ignored, so feature files
//! written by [`write_features`] read back as plain BIO files.
//!
//! The feature format is an interchange convention of this toolkit:
//! `surface<TAB>f_1<TAB>…<TAB>f_k<TAB>gold`, one per-type BIO feature label
//! per registry type, gold label last.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{
    check_surface, parse_bio_label, BioKind, BioLabel, BioViolation, Gazetteer, GazetteerEntry, GroupKey, Language,
    Sentence, Source, TagRegistry, Token, TokenMode,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("i/o error: {0}")]
    Stream(#[from] io::Error),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("sentence {sentence}: {message}")]
    Shape { sentence: usize, message: String },
}

impl CorpusError {
    fn at(path: &Path, source: io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub source: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(source: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        Self {
            source: source.into(),
            sentences,
        }
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

/// A sentence whose gold labels break the BIO scheme. Reported, not fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioWarning {
    pub sentence: usize,
    pub first_line: usize,
    pub violations: Vec<BioViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadOutcome {
    pub document: Document,
    pub warnings: Vec<BioWarning>,
}

/// Reads a BIO corpus. Malformed lines are errors; BIO-invalid gold
/// sequences load and are reported as warnings.
pub fn read_bio<R: BufRead>(
    reader: R,
    mode: TokenMode,
    registry: Option<&TagRegistry>,
) -> Result<ReadOutcome, CorpusError> {
    let mut sentences = Vec::new();
    let mut warnings = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut first_line = 0;

    let mut flush = |tokens: &mut Vec<Token>, first_line: usize, sentences: &mut Vec<Sentence>| {
        if tokens.is_empty() {
            return;
        }
        let sentence = Sentence {
            tokens: std::mem::take(tokens),
            mode,
        };
        let violations = sentence.violations();
        if !violations.is_empty() {
            warnings.push(BioWarning {
                sentence: sentences.len(),
                first_line,
                violations,
            });
        }
        sentences.push(sentence);
    };

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut current, first_line, &mut sentences);
            continue;
        }
        if line.starts_with("-DOCSTART-") {
            continue;
        }
        let mut fields = line.split([' ', '\t']).filter(|f| !f.is_empty());
        let surface = fields.next().unwrap_or_default();
        let Some(label_text) = fields.next_back() else {
            return Err(CorpusError::Line {
                line: line_no,
                message: format!("expected `surface<SEP>label`, got `{line}`"),
            });
        };
        check_surface(surface, mode).map_err(|e| CorpusError::Line {
            line: line_no,
            message: e.to_string(),
        })?;
        let gold = parse_bio_label(label_text, registry).map_err(|e| CorpusError::Line {
            line: line_no,
            message: e.to_string(),
        })?;
        if current.is_empty() {
            first_line = line_no;
        }
        current.push(Token::new(surface, gold));
    }
    flush(&mut current, first_line, &mut sentences);
    drop(flush);

    Ok(ReadOutcome {
        document: Document::new("", sentences),
        warnings,
    })
}

pub fn read_bio_file(
    path: &Path,
    mode: TokenMode,
    registry: Option<&TagRegistry>,
) -> Result<ReadOutcome, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::at(path, e))?;
    let mut outcome = read_bio(BufReader::new(file), mode, registry)?;
    outcome.document.source = path.display().to_string();
    Ok(outcome)
}

/// Writes `surface<TAB>gold` lines with a blank line after each sentence.
pub fn write_bio<W: Write>(doc: &Document, mut out: W) -> io::Result<()> {
    for sentence in &doc.sentences {
        for t in &sentence.tokens {
            writeln!(out, "{}\t{}", t.surface, t.gold)?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Per-token gazetteer feature labels for one sentence, one column per tag
/// type in registry order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureColumns {
    tags: Vec<String>,
    rows: Vec<Vec<BioKind>>,
}

impl FeatureColumns {
    /// `rows[token][type]`; every row must have one entry per tag.
    pub fn new(tags: Vec<String>, rows: Vec<Vec<BioKind>>) -> Result<Self, String> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != tags.len()) {
            return Err(format!("token {i} has {} feature labels, expected {}", r.len(), tags.len()));
        }
        Ok(Self { tags, rows })
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn token_count(&self) -> usize {
        self.rows.len()
    }

    pub fn kinds(&self, token: usize) -> &[BioKind] {
        &self.rows[token]
    }

    pub fn label(&self, token: usize, tag_index: usize) -> BioLabel {
        BioLabel::new(self.rows[token][tag_index], &self.tags[tag_index])
    }

    /// Flattened one-hot vector of a token: three values per type, ordered
    /// B, I, O.
    pub fn one_hot(&self, token: usize) -> Vec<u8> {
        self.rows[token]
            .iter()
            .flat_map(|k| match k {
                BioKind::B => [1, 0, 0],
                BioKind::I => [0, 1, 0],
                BioKind::O => [0, 0, 1],
            })
            .collect()
    }

    pub fn one_hot_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.rows.len()).map(|t| self.one_hot(t)).collect()
    }

    /// Inverse of [`FeatureColumns::one_hot_matrix`].
    pub fn from_one_hot(tags: Vec<String>, matrix: &[Vec<u8>]) -> Result<Self, String> {
        let mut rows = Vec::with_capacity(matrix.len());
        for (t, vec) in matrix.iter().enumerate() {
            if vec.len() != 3 * tags.len() {
                return Err(format!("token {t}: one-hot width {} != {}", vec.len(), 3 * tags.len()));
            }
            let row = vec
                .chunks(3)
                .map(|g| match g {
                    [1, 0, 0] => Ok(BioKind::B),
                    [0, 1, 0] => Ok(BioKind::I),
                    [0, 0, 1] => Ok(BioKind::O),
                    other => Err(format!("token {t}: invalid one-hot group {other:?}")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Self { tags, rows })
    }
}

/// Writes the feature format: `surface<TAB>f_1…f_k<TAB>gold`, blank line
/// after each sentence. Output is byte-for-byte deterministic.
pub fn write_features<W: Write>(doc: &Document, features: &[FeatureColumns], mut out: W) -> Result<(), CorpusError> {
    if features.len() != doc.sentences.len() {
        return Err(CorpusError::Shape {
            sentence: features.len().min(doc.sentences.len()),
            message: format!(
                "{} feature blocks for {} sentences",
                features.len(),
                doc.sentences.len()
            ),
        });
    }
    let width = features.first().map(|f| f.tags.len());
    for (i, (sentence, cols)) in doc.sentences.iter().zip(features).enumerate() {
        if cols.token_count() != sentence.len() {
            return Err(CorpusError::Shape {
                sentence: i,
                message: format!("{} feature rows for {} tokens", cols.token_count(), sentence.len()),
            });
        }
        if Some(cols.tags.len()) != width {
            return Err(CorpusError::Shape {
                sentence: i,
                message: "feature column count differs between sentences".into(),
            });
        }
        for (t, token) in sentence.tokens.iter().enumerate() {
            let mut line = String::with_capacity(16 + 8 * cols.tags.len());
            line.push_str(&token.surface);
            for k in 0..cols.tags.len() {
                line.push('\t');
                line.push_str(&cols.label(t, k).to_string());
            }
            line.push('\t');
            line.push_str(&token.gold.to_string());
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GazetteerFileRead {
    pub entries: Vec<GazetteerEntry>,
    pub duplicates: usize,
    /// Line numbers of blank lines that were skipped.
    pub empty_lines: Vec<usize>,
}

/// Reads one name per line. Each line splits on whitespace into tokens;
/// repeated names are dropped and counted.
pub fn read_gazetteer_file<R: BufRead>(
    reader: R,
    tag: &str,
    source: Source,
    language: Language,
) -> Result<GazetteerFileRead, CorpusError> {
    let mut seen = std::collections::HashSet::new();
    let mut out = GazetteerFileRead::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let tokens = crate::model::split_name(&line);
        if tokens.is_empty() {
            out.empty_lines.push(idx + 1);
            continue;
        }
        if !seen.insert(tokens.clone()) {
            out.duplicates += 1;
            continue;
        }
        out.entries.push(GazetteerEntry::new(tokens, tag, source, language));
    }
    Ok(out)
}

/// Writes one group, one name per line in the group's sorted order.
pub fn write_gazetteer_group<'a, W, I>(entries: I, mut out: W) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Vec<String>>,
{
    for tokens in entries {
        out.write_all(tokens.join(" ").as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirLoadReport {
    pub files: usize,
    pub duplicates: usize,
    pub empty_lines: usize,
    /// Files whose names do not follow `<lang>_<TAG>_<source>.txt`.
    pub ignored: Vec<PathBuf>,
}

/// Loads every `<lang>_<TAG>_<source>.txt` file in a directory.
pub fn load_gazetteer_dir(dir: &Path) -> Result<(Gazetteer, DirLoadReport), CorpusError> {
    let mut report = DirLoadReport::default();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CorpusError::at(dir, e))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(|e| CorpusError::at(dir, e))?;
    paths.sort();
    let mut gazetteer = Gazetteer::new();
    for path in paths {
        let key = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(GroupKey::from_file_name);
        let Some(key) = key.filter(|_| path.is_file()) else {
            report.ignored.push(path);
            continue;
        };
        let file = File::open(&path).map_err(|e| CorpusError::at(&path, e))?;
        let read = read_gazetteer_file(BufReader::new(file), &key.tag, key.source, key.language)?;
        report.files += 1;
        report.duplicates += read.duplicates;
        report.empty_lines += read.empty_lines.len();
        gazetteer.ensure_group(key);
        for e in read.entries {
            gazetteer.insert(e);
        }
    }
    Ok((gazetteer, report))
}

/// Writes each group to `<dir>/<lang>_<TAG>_<source>.txt`, creating the
/// directory if needed. Returns the written paths.
pub fn write_gazetteer_dir(gazetteer: &Gazetteer, dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    fs::create_dir_all(dir).map_err(|e| CorpusError::at(dir, e))?;
    let mut written = Vec::new();
    for (key, set) in gazetteer.groups() {
        let path = dir.join(key.file_name());
        let file = File::create(&path).map_err(|e| CorpusError::at(&path, e))?;
        write_gazetteer_group(set, BufWriter::new(file)).map_err(|e| CorpusError::at(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const AIRPORT_TOKENS: [&str; 13] = [
        "Jack",
        "is",
        "on",
        "Hong",
        "Kong",
        "International",
        "Airport",
        "in",
        "Lantau",
        "Island",
        ",",
        "Hong",
        "Kong",
    ];

    fn read(text: &str) -> ReadOutcome {
        read_bio(text.as_bytes(), TokenMode::Word, None).unwrap()
    }

    #[test]
    fn minimal_file() {
        let out = read("Jack B-PER\n\n");
        assert_eq!(out.document.sentences.len(), 1);
        assert_eq!(out.document.sentences[0].tokens[0].gold, BioLabel::Begin("PER".into()));
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn thirteen_line_sentence() {
        let text: String = AIRPORT_TOKENS.iter().map(|t| format!("{t}\tO\n")).collect();
        let out = read(&text);
        assert_eq!(out.document.sentences.len(), 1);
        assert_eq!(out.document.sentences[0].len(), 13);
        assert_eq!(out.document.sentences[0].tokens[10].surface, ",");
    }

    #[test]
    fn blank_runs_collapse() {
        let collapsed = read("a O\nb B-PER\n\nc O\n");
        let spaced = read("\n\na O\nb  \t B-PER\n\n\n \t\nc O\n\n\n");
        assert_eq!(collapsed.document, spaced.document);
        assert_eq!(spaced.document.sentences.len(), 2);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let err = read_bio("a O\nlonely\n".as_bytes(), TokenMode::Word, None).unwrap_err();
        assert!(matches!(err, CorpusError::Line { line: 2, .. }), "{err}");
        let err = read_bio("a O\nb X-PER\n".as_bytes(), TokenMode::Word, None).unwrap_err();
        assert!(matches!(err, CorpusError::Line { line: 2, .. }));
        let reg = TagRegistry::default_types();
        let err = read_bio("a B-PERSON\n".as_bytes(), TokenMode::Word, Some(&reg)).unwrap_err();
        assert!(err.to_string().contains("PERSON"));
        let err = read_bio("香港 O\n".as_bytes(), TokenMode::Character, None).unwrap_err();
        assert!(matches!(err, CorpusError::Line { line: 1, .. }));
    }

    #[test]
    fn invalid_bio_loads_with_warning() {
        let out = read("x O\ny O\n\na O\nb I-PER\n");
        assert_eq!(out.document.sentences.len(), 2);
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.warnings[0].sentence, 1);
        assert_eq!(out.warnings[0].first_line, 4);
        assert_eq!(out.warnings[0].violations[0].index, 1);
    }

    #[test]
    fn feature_line_layout() {
        let doc = read("Hong B-GPE\nKong I-GPE\n").document;
        let tags: Vec<String> = ["PER", "LOC", "GPE", "ORG"].map(String::from).to_vec();
        use BioKind::*;
        let cols = FeatureColumns::new(tags, vec![vec![O, O, B, O], vec![O, O, I, O]]).unwrap();
        let mut buf = Vec::new();
        write_features(&doc, &[cols], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "Hong\tO\tO\tB-GPE\tO\tB-GPE\nKong\tO\tO\tI-GPE\tO\tI-GPE\n\n"
        );
    }

    #[test]
    fn empty_document_writes_nothing() {
        let mut buf = Vec::new();
        write_features(&Document::default(), &[], &mut buf).unwrap();
        assert!(buf.is_empty());
    }

    #[test]
    fn feature_shape_mismatch_is_an_error() {
        let doc = read("a O\nb O\n").document;
        let cols = FeatureColumns::new(vec!["PER".into()], vec![vec![BioKind::O]]).unwrap();
        assert!(matches!(
            write_features(&doc, &[cols], Vec::new()),
            Err(CorpusError::Shape { sentence: 0, .. })
        ));
        assert!(write_features(&doc, &[], Vec::new()).is_err());
    }

    #[test]
    fn one_hot_round_trip_and_validation() {
        use BioKind::*;
        let cols = FeatureColumns::new(vec!["A".into(), "B".into()], vec![vec![B, O], vec![I, O]]).unwrap();
        let m = cols.one_hot_matrix();
        assert_eq!(m[0], vec![1, 0, 0, 0, 0, 1]);
        assert_eq!(FeatureColumns::from_one_hot(vec!["A".into(), "B".into()], &m).unwrap(), cols);
        assert!(FeatureColumns::from_one_hot(vec!["A".into()], &[vec![1, 1, 0]]).is_err());
    }

    #[test]
    fn gazetteer_file_examples() {
        let en = Language::new("en").unwrap();
        let r = read_gazetteer_file("Lantau Island\n".as_bytes(), "LOC", Source::Canonical, en).unwrap();
        assert_eq!(r.entries[0].tokens, ["Lantau", "Island"]);
        let r = read_gazetteer_file("JHU\nJHU\n".as_bytes(), "ORG", Source::Alias, en).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.duplicates, 1);
        let r = read_gazetteer_file("Hong Kong Government\n\n".as_bytes(), "GPE", Source::Canonical, en).unwrap();
        assert_eq!(r.entries[0].tokens.len(), 3);
        assert_eq!(r.empty_lines, vec![2]);
    }

    #[test]
    fn gazetteer_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let en = Language::new("en").unwrap();
        let mut g = Gazetteer::new();
        g.insert(GazetteerEntry::from_name("Lantau Island", "LOC", Source::Canonical, en));
        g.insert(GazetteerEntry::from_name("AK-47", "MIL_N", Source::Alias, en));
        write_gazetteer_dir(&g, dir.path()).unwrap();
        fs::write(dir.path().join("notes.md"), "x").unwrap();
        let (back, report) = load_gazetteer_dir(dir.path()).unwrap();
        assert_eq!(back, g);
        assert_eq!(report.files, 2);
        assert_eq!(report.ignored.len(), 1);
    }

    fn arb_document() -> impl Strategy<Value = Document> {
        let label = prop_oneof![
            Just("O".to_string()),
            "[BI]-(PER|ORG|GPE)".prop_map(|s| s)
        ];
        let token = ("[A-Za-z,.]{1,6}", label);
        let sentence = prop::collection::vec(token, 1..8);
        prop::collection::vec(sentence, 0..6).prop_map(|ss| {
            let sentences = ss
                .into_iter()
                .map(|toks| Sentence {
                    tokens: toks.into_iter().map(|(s, l)| Token::new(s, l.parse().unwrap())).collect(),
                    mode: TokenMode::Word,
                })
                .collect();
            Document::new("", sentences)
        })
    }

    proptest! {
        #[test]
        fn feature_file_reads_back_as_bio(doc in arb_document()) {
            let tags: Vec<String> = vec!["PER".into(), "LOC".into()];
            let features: Vec<_> = doc
                .sentences
                .iter()
                .map(|s| FeatureColumns::new(tags.clone(), vec![vec![BioKind::O, BioKind::B]; s.len()]).unwrap())
                .collect();
            let mut buf = Vec::new();
            write_features(&doc, &features, &mut buf).unwrap();
            let back = read_bio(&buf[..], TokenMode::Word, None).unwrap().document;
            prop_assert_eq!(back, doc.clone());

            let mut plain = Vec::new();
            write_bio(&doc, &mut plain).unwrap();
            prop_assert_eq!(read_bio(&plain[..], TokenMode::Word, None).unwrap().document, doc);
        }
    }
}
