use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, LineWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use gazkit_core::augment::{augment_document, AugmentConfig, TypeSelection};
use gazkit_core::corpus::{load_gazetteer_dir, read_bio_file, write_bio, write_features, write_gazetteer_dir, Document};
use gazkit_core::eval::{coverage, parse_samples, score, welch_t_test, CoverageOptions, TTest};
use gazkit_core::inflect::{FamiliarForms, Inflector, RuleSet};
use gazkit_core::matcher::{encode_one_hot, AnnotatorOptions, CasePolicy, GazetteerAnnotator, PartialPolicy};
use gazkit_core::normalize::{FilterRuleSet, GazetteerBuilder};
use gazkit_core::wikidata::{
    build_type_map, discover_instantiated_subtypes, fetch_names, read_target_roots, DumpScanner, FetchPlan,
    HttpTransport, LabelKind, Qid, QueryTransport, RateGate, RawNameRecord, RecordedTransport, Recorder, TypeMap,
    DEFAULT_ENDPOINT, DEFAULT_TYPE_ROOTS,
};
use gazkit_core::{Gazetteer, Language, Source, TagRegistry, TokenMode};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::{CliError, MatchArgs, NetArgs};

/// One fetched or scanned name with its target types; the interchange
/// format between `fetch`/`scan-dump` and `clean`.
#[derive(Debug, Serialize, Deserialize)]
struct RecordLine {
    entity: Qid,
    kind: LabelKind,
    text: String,
    language: String,
    tags: BTreeSet<String>,
}

impl RecordLine {
    fn new(r: &RawNameRecord, tags: BTreeSet<String>) -> Self {
        Self {
            entity: r.entity,
            kind: r.kind,
            text: r.text.clone(),
            language: r.language.to_string(),
            tags,
        }
    }
}

fn open_in(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::data(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn write_err(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    match path {
        Some(p) => CliError::data(format!("{}: {e}", p.display())),
        None => CliError::data(format!("stdout: {e}")),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn parse_flag<T: std::str::FromStr<Err = E>, E: std::fmt::Display>(flag: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

pub struct Context {
    pub config: PipelineConfig,
}

impl Context {
    fn language(&self, flag: Option<&str>) -> Result<Language, CliError> {
        let code = flag.or(self.config.languages.first().map(String::as_str)).unwrap_or("en");
        parse_flag("language", code)
    }

    fn registry(&self, flag: Option<&Path>) -> Result<TagRegistry, CliError> {
        match flag.or(self.config.registry.as_deref()) {
            Some(p) => TagRegistry::read(open_in(p)?).map_err(|e| CliError::data(format!("{}: {e}", p.display()))),
            None => Ok(TagRegistry::default_types()),
        }
    }

    fn gazetteer(&self, flag: Option<&Path>) -> Result<Gazetteer, CliError> {
        let dir = flag
            .or(self.config.gazetteer_dir.as_deref())
            .ok_or_else(|| CliError::Usage("--gazetteer-dir is required (or gazetteer_dir in the config)".into()))?;
        let (gaz, report) = load_gazetteer_dir(dir).map_err(|e| CliError::data(e.to_string()))?;
        eprintln!(
            "gazetteer: {} entries in {} files ({} duplicate lines, {} ignored files)",
            gaz.len(),
            report.files,
            report.duplicates,
            report.ignored.len()
        );
        Ok(gaz)
    }

    fn mode(&self, flag: Option<&str>) -> Result<TokenMode, CliError> {
        match (flag, &self.config.matcher.mode) {
            (Some(m), _) => parse_flag("mode", m),
            (None, Some(m)) => m.parse().map_err(CliError::Data),
            (None, None) => Ok(TokenMode::Word),
        }
    }

    fn sources(&self, flag: Option<&[String]>) -> Result<Vec<Source>, CliError> {
        match (flag, &self.config.matcher.sources) {
            (Some(list), _) => list.iter().map(|s| parse_flag("sources", s)).collect(),
            (None, Some(list)) => list.iter().map(|s| s.parse().map_err(CliError::Data)).collect(),
            (None, None) => Ok(Source::ALL.to_vec()),
        }
    }

    fn corpus(&self, path: &Path, mode: TokenMode, registry: Option<&TagRegistry>) -> Result<Document, CliError> {
        let outcome = read_bio_file(path, mode, registry).map_err(|e| match e {
            gazkit_core::corpus::CorpusError::Io { .. } => CliError::data(e.to_string()),
            other => CliError::data(format!("{}: {other}", path.display())),
        })?;
        for w in &outcome.warnings {
            eprintln!(
                "{}: sentence {} (line {}) breaks BIO at {} token(s)",
                path.display(),
                w.sentence + 1,
                w.first_line,
                w.violations.len()
            );
        }
        Ok(outcome.document)
    }

    fn transport(&self, net: &NetArgs) -> Result<Box<dyn QueryTransport>, CliError> {
        if net.timeout_seconds == 0 || net.timeout_seconds > 60 {
            return Err(CliError::Usage("--timeout-seconds must be between 1 and 60".into()));
        }
        if let Some(p) = &net.replay {
            let t = RecordedTransport::open(p).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?;
            return Ok(Box::new(t));
        }
        let endpoint = net
            .endpoint
            .clone()
            .or_else(|| self.config.endpoint.clone())
            .unwrap_or_else(|| DEFAULT_ENDPOINT.to_string());
        let http = HttpTransport::new(
            &endpoint,
            Duration::from_secs(net.timeout_seconds),
            RateGate::new(Duration::from_millis(net.interval_ms)),
        );
        match &net.record {
            Some(p) => {
                let f = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .map_err(|e| CliError::data(format!("{}: {e}", p.display())))?;
                Ok(Box::new(Recorder::new(http, LineWriter::new(f))))
            }
            None => Ok(Box::new(http)),
        }
    }

    pub fn map_types(&self, roots: Option<PathBuf>, out: Option<PathBuf>, net: &NetArgs) -> Result<(), CliError> {
        let targets = match &roots {
            Some(p) => read_target_roots(open_in(p)?).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?,
            None => read_target_roots(DEFAULT_TYPE_ROOTS.as_bytes()).map_err(CliError::Data)?,
        };
        let transport = self.transport(net)?;
        let mut discovered: BTreeMap<Qid, Vec<Qid>> = BTreeMap::new();
        for (tag, ids) in &targets {
            for root in ids {
                if discovered.contains_key(root) {
                    continue;
                }
                let found =
                    discover_instantiated_subtypes(*root, &*transport).map_err(|e| CliError::data(e.to_string()))?;
                eprintln!("{tag} {root}: {} instantiated subtypes", found.len());
                discovered.insert(*root, found);
            }
        }
        let map = build_type_map(&targets, &discovered);
        eprintln!("type map: {} fine-grained types", map.len());
        let mut w = open_out(out.as_deref())?;
        map.write(&mut w).and_then(|_| w.flush()).map_err(|e| write_err(out.as_deref(), e))
    }

    pub fn fetch(
        &self,
        tag: &str,
        type_map: &Path,
        language: Option<String>,
        page_size: usize,
        out: Option<PathBuf>,
        net: &NetArgs,
    ) -> Result<(), CliError> {
        let map = TypeMap::read(open_in(type_map)?).map_err(|e| CliError::data(format!("{}: {e}", type_map.display())))?;
        let types = map.types_for(tag);
        if types.is_empty() {
            return Err(CliError::data(format!("{}: no types mapped to {tag}", type_map.display())));
        }
        let plan = FetchPlan {
            tag: tag.to_string(),
            types,
            language: self.language(language.as_deref())?,
            page_size,
            endpoint: net.endpoint.clone().unwrap_or_default(),
            timeout_secs: net.timeout_seconds,
        };
        let transport = self.transport(net)?;
        let mut fetcher = fetch_names(&plan, &*transport).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut w = open_out(out.as_deref())?;
        let tags = BTreeSet::from([tag.to_string()]);
        let mut failure = None;
        for item in fetcher.by_ref() {
            match item {
                Ok(r) => {
                    let line = serde_json::to_string(&RecordLine::new(&r, tags.clone())).expect("serializable");
                    writeln!(w, "{line}").map_err(|e| write_err(out.as_deref(), e))?;
                }
                Err(e) => failure = Some(e),
            }
        }
        w.flush().map_err(|e| write_err(out.as_deref(), e))?;
        let p = fetcher.progress();
        eprintln!(
            "fetch {tag}: {} records, {} queries, {} duplicates, {} timeouts, {} splits",
            p.records, p.queries, p.duplicates, p.timeouts, p.splits
        );
        match failure {
            Some(e) => Err(CliError::data(e.to_string())),
            None => Ok(()),
        }
    }

    pub fn scan_dump(
        &self,
        dump: &Path,
        type_map: &Path,
        languages: Vec<String>,
        max_line: usize,
        out: Option<PathBuf>,
    ) -> Result<(), CliError> {
        let map = TypeMap::read(open_in(type_map)?).map_err(|e| CliError::data(format!("{}: {e}", type_map.display())))?;
        let codes = if languages.is_empty() {
            self.config.languages.clone()
        } else {
            languages
        };
        let langs: Vec<Language> = if codes.is_empty() {
            vec![self.language(None)?]
        } else {
            codes.iter().map(|c| parse_flag("language", c)).collect::<Result<_, _>>()?
        };
        let reader: Box<dyn BufRead> = if dump == Path::new("-") {
            Box::new(io::stdin().lock())
        } else {
            Box::new(open_in(dump)?)
        };
        let mut scanner = DumpScanner::new(reader, &map, &langs, max_line);
        let mut w = open_out(out.as_deref())?;
        for item in scanner.by_ref() {
            let (r, tags) = item.map_err(|e| CliError::data(format!("{}: {e}", dump.display())))?;
            let line = serde_json::to_string(&RecordLine::new(&r, tags)).expect("serializable");
            writeln!(w, "{line}").map_err(|e| write_err(out.as_deref(), e))?;
        }
        w.flush().map_err(|e| write_err(out.as_deref(), e))?;
        let s = scanner.stats();
        eprintln!(
            "scan: {} entities, {} matched, {} records, {} malformed, {} oversized lines",
            s.entities, s.matched, s.records, s.malformed, s.oversized
        );
        Ok(())
    }

    pub fn clean(
        &self,
        inputs: &[PathBuf],
        rules: Option<PathBuf>,
        out_dir: &Path,
        reject_log: Option<PathBuf>,
    ) -> Result<(), CliError> {
        let rules = match rules.as_deref().or(self.config.filter_rules.as_deref()) {
            Some(p) => FilterRuleSet::read_file(p).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?,
            None => FilterRuleSet::shipped(),
        };
        let mut builder = GazetteerBuilder::new(&rules);
        for path in inputs {
            for (i, line) in open_in(path)?.lines().enumerate() {
                let line = line.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
                if line.trim().is_empty() {
                    continue;
                }
                let bad = |m: String| CliError::data(format!("{}:{}: {m}", path.display(), i + 1));
                let rec: RecordLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
                let raw = RawNameRecord {
                    entity: rec.entity,
                    kind: rec.kind,
                    text: rec.text,
                    language: rec.language.parse().map_err(|e: gazkit_core::LanguageError| bad(e.to_string()))?,
                };
                builder.add_record(&raw, &rec.tags);
            }
        }
        let (gaz, report) = builder.finish();
        write_gazetteer_dir(&gaz, out_dir).map_err(|e| CliError::data(e.to_string()))?;
        if let Some(p) = &reject_log {
            let mut w = open_out(Some(p))?;
            report
                .write_reject_log(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| write_err(Some(p), e))?;
        }
        let t = report.totals();
        eprintln!(
            "clean: {} accepted, {} rejected, {} duplicates in {} groups",
            t.accepted,
            t.rejected,
            t.duplicates,
            report.groups.len()
        );
        Ok(())
    }

    pub fn inflect(
        &self,
        gazetteer: Option<PathBuf>,
        out_dir: &Path,
        rules: Option<PathBuf>,
        familiar: Option<PathBuf>,
    ) -> Result<(), CliError> {
        let gaz = self.gazetteer(gazetteer.as_deref())?;
        let rules = match rules.as_deref().or(self.config.inflection_rules.as_deref()) {
            Some(p) => RuleSet::parse(&read_text(p)?).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?,
            None => RuleSet::shipped(),
        };
        let familiar = match familiar.as_deref().or(self.config.familiar_forms.as_deref()) {
            Some(p) => {
                FamiliarForms::parse(&read_text(p)?).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?
            }
            None => FamiliarForms::shipped(),
        };
        let inflected = Inflector::new(&rules, &familiar).inflect_gazetteer(&gaz);
        write_gazetteer_dir(&inflected, out_dir).map_err(|e| CliError::data(e.to_string()))?;
        eprintln!("inflect: {} inflected entries", inflected.len());
        Ok(())
    }

    pub fn match_corpus(
        &self,
        input: &Path,
        out: Option<PathBuf>,
        common: &MatchArgs,
        partial: Option<bool>,
        case: Option<String>,
    ) -> Result<(), CliError> {
        let registry = self.registry(common.registry.as_deref())?;
        let mode = self.mode(common.mode.as_deref())?;
        let case: CasePolicy = match (case, &self.config.matcher.case) {
            (Some(c), _) => parse_flag("case", &c)?,
            (None, Some(c)) => c.parse().map_err(CliError::Data)?,
            (None, None) => CasePolicy::Sensitive,
        };
        let policy = match &self.config.matcher.single_token_partial {
            Some(tags) => PartialPolicy {
                single_token_tags: tags.iter().cloned().collect(),
            },
            None => PartialPolicy::default(),
        };
        let options = AnnotatorOptions {
            language: self.language(common.language.as_deref())?,
            sources: self.sources(common.sources.as_deref())?,
            mode,
            case,
            partial: partial.or(self.config.matcher.partial).unwrap_or(true),
            policy,
        };
        let doc = self.corpus(input, mode, Some(&registry))?;
        let gaz = self.gazetteer(common.gazetteer.as_deref())?;
        let annotator = GazetteerAnnotator::build(&gaz, &registry, &options);
        let columns: Vec<_> = annotator
            .annotate_document(&doc)
            .iter()
            .map(|l| encode_one_hot(l, &registry))
            .collect();
        let mut w = open_out(out.as_deref())?;
        write_features(&doc, &columns, &mut w).map_err(|e| write_err(out.as_deref(), e))?;
        eprintln!("match: {} sentences, {} tokens", doc.sentences.len(), doc.token_count());
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    pub fn augment(
        &self,
        input: &Path,
        out: Option<PathBuf>,
        common: &MatchArgs,
        seed: Option<u64>,
        types: Option<Vec<String>>,
        consistent: Option<bool>,
        probability: Option<f64>,
    ) -> Result<(), CliError> {
        let section = &self.config.augment;
        let mode = self.mode(common.mode.as_deref())?;
        let doc = self.corpus(input, mode, None)?;
        let gaz = self.gazetteer(common.gazetteer.as_deref())?;
        let mut config = AugmentConfig::new(
            self.language(common.language.as_deref())?,
            seed.or(section.seed).unwrap_or(0),
        );
        config.sources = self.sources(common.sources.as_deref())?;
        config.consistent = consistent.or(section.consistent).unwrap_or(false);
        config.probability = probability.or(section.probability).unwrap_or(1.0);
        match types.or_else(|| section.types.clone()) {
            Some(list) if list.iter().any(|t| t == "all") => config.types = TypeSelection::All,
            Some(list) => config.types = TypeSelection::Only(list.into_iter().collect()),
            None => {}
        }
        let outcome = augment_document(&doc, &gaz, &config).map_err(|e| CliError::data(e.to_string()))?;
        let mut w = open_out(out.as_deref())?;
        write_bio(&outcome.document, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| write_err(out.as_deref(), e))?;
        eprintln!("augment: {} replaced, {} kept", outcome.replaced, outcome.kept);
        Ok(())
    }

    pub fn coverage(
        &self,
        input: &Path,
        common: &MatchArgs,
        types: Option<Vec<String>>,
        unique: bool,
        fold_case: bool,
        tsv: bool,
    ) -> Result<(), CliError> {
        let mode = self.mode(common.mode.as_deref())?;
        let doc = self.corpus(input, mode, None)?;
        let gaz = self.gazetteer(common.gazetteer.as_deref())?;
        let mut options = CoverageOptions::new(self.language(common.language.as_deref())?);
        options.sources = self.sources(common.sources.as_deref())?;
        options.types = types.unwrap_or_default();
        options.unique = unique;
        options.fold_case = fold_case;
        let table = coverage(&doc, &gaz, &options).table();
        print!("{}", if tsv { table.to_tsv() } else { table.to_text() });
        Ok(())
    }

    pub fn score(&self, gold: &Path, pred: &Path, mode: Option<String>, tsv: bool) -> Result<(), CliError> {
        let mode = self.mode(mode.as_deref())?;
        let g = self.corpus(gold, mode, None)?;
        let p = self.corpus(pred, mode, None)?;
        let report = score(&g, &p).map_err(|e| CliError::data(format!("{} vs {}: {e}", gold.display(), pred.display())))?;
        let table = report.table();
        print!("{}", if tsv { table.to_tsv() } else { table.to_text() });
        Ok(())
    }

    pub fn ttest(&self, a: &Path, b: &Path) -> Result<(), CliError> {
        let load = |p: &Path| parse_samples(open_in(p)?).map_err(|e| CliError::data(format!("{}: {e}", p.display())));
        let (xs, ys) = (load(a)?, load(b)?);
        match welch_t_test(&xs, &ys) {
            TTest::Value { t, df, p } => println!("t\t{t:.6}\ndf\t{df:.4}\np\t{p:.6e}"),
            TTest::Degenerate => {
                eprintln!("ttest: undefined (a sample has fewer than two values or both are constant)");
                println!("t\tNA\ndf\tNA\np\tNA");
            }
        }
        Ok(())
    }
}
