//! `gazkit`: gazetteer construction from Wikidata and gazetteer-based
//! tooling for BIO corpora.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.
//! Data goes to files or stdout; diagnostics and progress go to stderr.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::PipelineConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gazkit", version, about = "Wikidata gazetteers and gazetteer features for NER corpora")]
struct Cli {
    /// Pipeline configuration file (TOML). Flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for corpus-scale commands [default: all cores]
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// SPARQL endpoint
    #[arg(long, env = "GAZKIT_ENDPOINT")]
    pub endpoint: Option<String>,
    /// Per-query time budget, at most 60
    #[arg(long, default_value_t = 60)]
    pub timeout_seconds: u64,
    /// Minimum delay between requests
    #[arg(long, default_value_t = 1000, value_name = "MS")]
    pub interval_ms: u64,
    /// Answer queries from a recorded exchange file instead of the network
    #[arg(long, value_name = "JSONL", conflicts_with = "record")]
    pub replay: Option<PathBuf>,
    /// Append every query and its answer to this file
    #[arg(long, value_name = "JSONL")]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatchArgs {
    /// Gazetteer directory of `<lang>_<TAG>_<source>.txt` files
    #[arg(long = "gazetteer-dir", value_name = "DIR", visible_alias = "gazetteer")]
    pub gazetteer: Option<PathBuf>,
    #[arg(long)]
    pub language: Option<String>,
    /// Token mode: word or char
    #[arg(long)]
    pub mode: Option<String>,
    /// Comma separated gazetteer sources: canonical, alias, inflected
    #[arg(long, value_delimiter = ',')]
    pub sources: Option<Vec<String>>,
    /// Tag registry file [default: built-in 17 types]
    #[arg(long, value_name = "PATH")]
    pub registry: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Discover instantiated subtypes of each target root and write a type map
    MapTypes {
        /// `TAG<TAB>Qid,...` root file [default: bundled roots]
        #[arg(long, value_name = "PATH")]
        roots: Option<PathBuf>,
        #[arg(long = "output", short, visible_alias = "out")]
        out: Option<PathBuf>,
        #[command(flatten)]
        net: NetArgs,
    },
    /// Page canonical names and aliases of one target type out of SPARQL
    Fetch {
        /// Target tag whose fine-grained types are looked up in the type map
        #[arg(long = "type", value_name = "TAG")]
        tag: String,
        #[arg(long, value_name = "PATH")]
        type_map: PathBuf,
        #[arg(long)]
        language: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        page_size: usize,
        #[arg(long = "output", short, visible_alias = "out")]
        out: Option<PathBuf>,
        #[command(flatten)]
        net: NetArgs,
    },
    /// Stream names of typed entities out of a decompressed JSON dump
    ScanDump {
        /// Dump file, `-` for stdin
        #[arg(long)]
        dump: PathBuf,
        #[arg(long, value_name = "PATH")]
        type_map: PathBuf,
        /// Repeatable; defaults to the configured languages
        #[arg(long = "language")]
        languages: Vec<String>,
        #[arg(long, default_value_t = gazkit_core::wikidata::DEFAULT_MAX_LINE, value_name = "BYTES")]
        max_line_bytes: usize,
        #[arg(long = "output", short, visible_alias = "out")]
        out: Option<PathBuf>,
    },
    /// Clean fetched names and write gazetteer groups
    Clean {
        /// Record files written by `fetch` or `scan-dump`
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Filter rules (TOML) [default: bundled rules]
        #[arg(long, value_name = "PATH")]
        rules: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Write rejected names here
        #[arg(long, value_name = "PATH")]
        reject_log: Option<PathBuf>,
    },
    /// Add inflected Russian forms of canonical names and aliases
    Inflect {
        #[arg(long = "gazetteer-dir", value_name = "DIR", visible_alias = "gazetteer")]
        gazetteer: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        #[arg(long, value_name = "PATH")]
        rules: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        familiar: Option<PathBuf>,
    },
    /// Annotate a corpus with per-type gazetteer match features
    Match {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "output", short, visible_alias = "out")]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: MatchArgs,
        /// Partial matching: on or off [default: on]
        #[arg(long, value_parser = parse_switch, value_name = "on|off")]
        partial: Option<bool>,
        /// Case policy: sensitive or fold
        #[arg(long)]
        case: Option<String>,
    },
    /// Replace entities with random same-type gazetteer names
    Augment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long = "output", short, visible_alias = "out")]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: MatchArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma separated types to replace, or `all` [default: all]
        #[arg(long, value_delimiter = ',')]
        types: Option<Vec<String>>,
        /// Give every occurrence of a name the same replacement
        #[arg(long, value_parser = parse_switch, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
        consistent: Option<bool>,
        /// Chance that an entity is replaced
        #[arg(long = "prob", visible_alias = "probability", value_name = "P")]
        probability: Option<f64>,
    },
    /// Share of gold mentions whose surface is in the same-type gazetteer
    Coverage {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        common: MatchArgs,
        #[arg(long, value_delimiter = ',')]
        types: Option<Vec<String>>,
        /// Count distinct surfaces instead of mentions
        #[arg(long)]
        unique: bool,
        #[arg(long)]
        fold_case: bool,
        /// Tab separated output
        #[arg(long)]
        tsv: bool,
    },
    /// Entity-level precision, recall and F1
    Score {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        tsv: bool,
    },
    /// Welch's t-test on two files of scores, one per line
    Ttest {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn parse_switch(v: &str) -> Result<bool, String> {
    match v {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(format!("expected on/off or true/false, got `{v}`")),
    }
}

fn run(argv: impl IntoIterator<Item = OsString>) -> Result<(), CliError> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            if code == 0 {
                return Ok(());
            }
            return Err(CliError::Usage(String::new()));
        }
    };
    let config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ctx = commands::Context { config };
    match cli.command {
        Command::MapTypes { roots, out, net } => ctx.map_types(roots, out, &net),
        Command::Fetch {
            tag,
            type_map,
            language,
            page_size,
            out,
            net,
        } => ctx.fetch(&tag, &type_map, language, page_size, out, &net),
        Command::ScanDump {
            dump,
            type_map,
            languages,
            max_line_bytes,
            out,
        } => ctx.scan_dump(&dump, &type_map, languages, max_line_bytes, out),
        Command::Clean {
            inputs,
            rules,
            out_dir,
            reject_log,
        } => ctx.clean(&inputs, rules, &out_dir, reject_log),
        Command::Inflect {
            gazetteer,
            out_dir,
            rules,
            familiar,
        } => ctx.inflect(gazetteer, &out_dir, rules, familiar),
        Command::Match {
            input,
            out,
            common,
            partial,
            case,
        } => ctx.match_corpus(&input, out, &common, partial, case),
        Command::Augment {
            input,
            out,
            common,
            seed,
            types,
            consistent,
            probability,
        } => ctx.augment(&input, out, &common, seed, types, consistent, probability),
        Command::Coverage {
            input,
            common,
            types,
            unique,
            fold_case,
            tsv,
        } => ctx.coverage(&input, &common, types, unique, fold_case, tsv),
        Command::Score { gold, pred, mode, tsv } => ctx.score(&gold, &pred, mode, tsv),
        Command::Ttest { a, b } => ctx.ttest(&a, &b),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("gazkit: {msg}");
            }
            ExitCode::from(e.code())
        }
    }
}
