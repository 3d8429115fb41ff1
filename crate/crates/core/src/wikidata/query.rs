use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Qid;
use crate::model::Language;

pub const DEFAULT_ENDPOINT: &str = "https://query.wikidata.org/sparql";

/// The queries the ingest pipeline issues. Each renders to SPARQL text,
/// which also keys recorded responses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Query {
    /// Subtypes of `root` (itself included) with at least one direct
    /// instance.
    InstantiatedSubtypes { root: Qid },
    /// Direct subclasses of each parent, as `?parent ?type` rows.
    DirectSubclasses { parents: Vec<Qid> },
    /// Those of `types` with at least one direct instance.
    HasInstances { types: Vec<Qid> },
    /// Labels and aliases of direct instances of `types`, one page.
    Names {
        types: Vec<Qid>,
        language: Language,
        limit: usize,
        offset: usize,
    },
}

fn values(var: &str, ids: &[Qid]) -> String {
    let list: Vec<String> = ids.iter().map(|q| format!("wd:{q}")).collect();
    format!("VALUES ?{var} {{ {} }}", list.join(" "))
}

const PREFIXES: &str = "PREFIX wd: <http://www.wikidata.org/entity/>\n\
PREFIX wdt: <http://www.wikidata.org/prop/direct/>\n\
PREFIX rdfs: <http://www.w3.org/2000/01/rdf-schema#>\n\
PREFIX skos: <http://www.w3.org/2004/02/skos/core#>\n";

impl Query {
    pub fn text(&self) -> String {
        let mut s = String::from(PREFIXES);
        match self {
            Query::InstantiatedSubtypes { root } => {
                write!(
                    s,
                    "SELECT DISTINCT ?type WHERE {{\n  ?type wdt:P279* wd:{root} .\n  FILTER EXISTS {{ ?item wdt:P31 ?type . }}\n}}"
                )
            }
            Query::DirectSubclasses { parents } => write!(
                s,
                "SELECT DISTINCT ?parent ?type WHERE {{\n  {}\n  ?type wdt:P279 ?parent .\n}}",
                values("parent", parents)
            ),
            Query::HasInstances { types } => write!(
                s,
                "SELECT DISTINCT ?type WHERE {{\n  {}\n  FILTER EXISTS {{ ?item wdt:P31 ?type . }}\n}}",
                values("type", types)
            ),
            Query::Names {
                types,
                language,
                limit,
                offset,
            } => write!(
                s,
                "SELECT DISTINCT ?item ?kind ?name WHERE {{\n  {}\n  ?item wdt:P31 ?type .\n  \
                 {{ ?item rdfs:label ?name . BIND(\"canonical\" AS ?kind) }}\n  UNION\n  \
                 {{ ?item skos:altLabel ?name . BIND(\"alias\" AS ?kind) }}\n  \
                 FILTER(LANG(?name) = \"{language}\")\n}}\nORDER BY ?item ?kind ?name\nLIMIT {limit}\nOFFSET {offset}",
                values("type", types)
            ),
        }
        .expect("writing to a string");
        s
    }
}

/// Result rows as variable name to plain value (URIs and literals alike).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResult {
    pub rows: Vec<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
struct SparqlJson {
    results: SparqlResults,
}

#[derive(Deserialize)]
struct SparqlResults {
    bindings: Vec<BTreeMap<String, SparqlTerm>>,
}

#[derive(Deserialize)]
struct SparqlTerm {
    value: String,
}

impl QueryResult {
    /// Parses the standard SPARQL 1.1 JSON results format.
    pub fn from_sparql_json(text: &str) -> Result<Self, serde_json::Error> {
        let raw: SparqlJson = serde_json::from_str(text)?;
        Ok(Self {
            rows: raw
                .results
                .bindings
                .into_iter()
                .map(|b| b.into_iter().map(|(k, v)| (k, v.value)).collect())
                .collect(),
        })
    }

    /// Values of one variable parsed as item ids; other values are skipped.
    pub fn qids(&self, var: &str) -> Vec<Qid> {
        self.rows
            .iter()
            .filter_map(|r| r.get(var))
            .filter_map(|v| Qid::from_uri(v).ok())
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("query timed out")]
    Timeout,
    #[error("endpoint returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("request failed: {0}")]
    Request(String),
    #[error("undecodable response: {0}")]
    Decode(String),
    #[error("no recorded response for this query")]
    NotRecorded,
}

pub trait QueryTransport {
    fn execute(&self, query: &Query) -> Result<QueryResult, TransportError>;
}

impl<T: QueryTransport + ?Sized> QueryTransport for &T {
    fn execute(&self, query: &Query) -> Result<QueryResult, TransportError> {
        (**self).execute(query)
    }
}

/// Spaces out requests to one endpoint. Clones share the same clock.
#[derive(Debug, Clone)]
pub struct RateGate {
    interval: Duration,
    last: Arc<Mutex<Option<Instant>>>,
}

impl RateGate {
    pub fn new(interval: Duration) -> Self {
        Self {
            interval,
            last: Arc::new(Mutex::new(None)),
        }
    }

    /// Blocks until at least `interval` has passed since the previous
    /// caller went through.
    pub fn wait(&self) {
        let mut last = self.last.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(prev) = *last {
            let ready = prev + self.interval;
            let now = Instant::now();
            if ready > now {
                std::thread::sleep(ready - now);
            }
        }
        *last = Some(Instant::now());
    }
}

/// SPARQL over HTTP GET.
#[derive(Debug, Clone)]
pub struct HttpTransport {
    endpoint: String,
    agent: ureq::Agent,
    gate: RateGate,
}

impl HttpTransport {
    pub fn new(endpoint: &str, timeout: Duration, gate: RateGate) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent(concat!("gazkit/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        Self {
            endpoint: endpoint.to_string(),
            agent,
            gate,
        }
    }
}

impl QueryTransport for HttpTransport {
    fn execute(&self, query: &Query) -> Result<QueryResult, TransportError> {
        self.gate.wait();
        let response = self
            .agent
            .get(&self.endpoint)
            .query("query", query.text())
            .query("format", "json")
            .header("Accept", "application/sparql-results+json")
            .call();
        let mut response = match response {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Err(TransportError::Timeout),
            Err(e) => return Err(TransportError::Request(e.to_string())),
        };
        let status = response.status().as_u16();
        let body = response
            .body_mut()
            .with_config()
            .limit(1 << 30)
            .read_to_string()
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => TransportError::Timeout,
                other => TransportError::Request(other.to_string()),
            })?;
        // The public service reports its own query timeout as a server
        // error mentioning TimeoutException.
        if status == 504 || (status == 500 && body.contains("TimeoutException")) {
            return Err(TransportError::Timeout);
        }
        if !(200..300).contains(&status) {
            let mut body = body;
            body.truncate(500);
            return Err(TransportError::Http { status, body });
        }
        QueryResult::from_sparql_json(&body).map_err(|e| TransportError::Decode(e.to_string()))
    }
}

/// One line of a recording: the query text and either its result or the
/// error it produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<QueryResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Replays responses from a JSON-lines recording keyed by query text.
/// An `error` of `"timeout"` replays as a timeout.
#[derive(Debug, Clone, Default)]
pub struct RecordedTransport {
    responses: HashMap<String, Result<QueryResult, TransportError>>,
}

impl RecordedTransport {
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, String> {
        let mut responses = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| e.to_string())?;
            if line.trim().is_empty() {
                continue;
            }
            let ex: Exchange = serde_json::from_str(&line).map_err(|e| format!("line {}: {e}", i + 1))?;
            let outcome = match (ex.result, ex.error) {
                (Some(r), None) => Ok(r),
                (None, Some(e)) if e == "timeout" => Err(TransportError::Timeout),
                (None, Some(e)) => Err(TransportError::Request(e)),
                _ => return Err(format!("line {}: exactly one of result or error is required", i + 1)),
            };
            responses.insert(ex.query, outcome);
        }
        Ok(Self { responses })
    }

    pub fn open(path: &Path) -> Result<Self, String> {
        let f = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_reader(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn insert(&mut self, query: &Query, outcome: Result<QueryResult, TransportError>) {
        self.responses.insert(query.text(), outcome);
    }
}

impl QueryTransport for RecordedTransport {
    fn execute(&self, query: &Query) -> Result<QueryResult, TransportError> {
        self.responses
            .get(&query.text())
            .cloned()
            .unwrap_or(Err(TransportError::NotRecorded))
    }
}

/// Passes queries through and appends every exchange to a writer in the
/// format [`RecordedTransport`] reads.
pub struct Recorder<T, W> {
    inner: T,
    out: Mutex<W>,
}

impl<T, W: Write> Recorder<T, W> {
    pub fn new(inner: T, out: W) -> Self {
        Self {
            inner,
            out: Mutex::new(out),
        }
    }
}

impl<T: QueryTransport, W: Write> QueryTransport for Recorder<T, W> {
    fn execute(&self, query: &Query) -> Result<QueryResult, TransportError> {
        let outcome = self.inner.execute(query);
        let ex = Exchange {
            query: query.text(),
            result: outcome.as_ref().ok().cloned(),
            error: outcome.as_ref().err().map(|e| match e {
                TransportError::Timeout => "timeout".to_string(),
                other => other.to_string(),
            }),
        };
        let mut out = self.out.lock().unwrap_or_else(|e| e.into_inner());
        let line = serde_json::to_string(&ex).expect("serializable");
        writeln!(out, "{line}").map_err(|e| TransportError::Request(format!("recording failed: {e}")))?;
        outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sparql_json() {
        let body = r#"{"head":{"vars":["type"]},"results":{"bindings":[
            {"type":{"type":"uri","value":"http://www.wikidata.org/entity/Q5"}},
            {"type":{"type":"literal","value":"not an id"}}]}}"#;
        let r = QueryResult::from_sparql_json(body).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.qids("type"), vec![Qid(5)]);
    }

    #[test]
    fn query_text_is_stable() {
        let q = Query::Names {
            types: vec![Qid(5), Qid(15632617)],
            language: Language::new("ru").unwrap(),
            limit: 1000,
            offset: 2000,
        };
        let t = q.text();
        assert!(t.contains("VALUES ?type { wd:Q5 wd:Q15632617 }"));
        assert!(t.contains("FILTER(LANG(?name) = \"ru\")"));
        assert!(t.ends_with("LIMIT 1000\nOFFSET 2000"));
        assert!(Query::InstantiatedSubtypes { root: Qid(43229) }.text().contains("wdt:P279* wd:Q43229"));
    }

    #[test]
    fn record_and_replay() {
        let mut source = RecordedTransport::default();
        let q1 = Query::HasInstances { types: vec![Qid(1)] };
        let q2 = Query::HasInstances { types: vec![Qid(2)] };
        source.insert(&q1, Ok(QueryResult::default()));
        source.insert(&q2, Err(TransportError::Timeout));
        let mut log = Vec::new();
        {
            let rec = Recorder::new(&source, &mut log);
            assert!(rec.execute(&q1).is_ok());
            assert_eq!(rec.execute(&q2), Err(TransportError::Timeout));
        }
        let replay = RecordedTransport::from_reader(log.as_slice()).unwrap();
        assert_eq!(replay.execute(&q1), Ok(QueryResult::default()));
        assert_eq!(replay.execute(&q2), Err(TransportError::Timeout));
        assert_eq!(
            replay.execute(&Query::HasInstances { types: vec![Qid(3)] }),
            Err(TransportError::NotRecorded)
        );
    }

    #[test]
    fn gate_spaces_requests() {
        let gate = RateGate::new(Duration::from_millis(20));
        let other = gate.clone();
        let start = Instant::now();
        gate.wait();
        other.wait();
        gate.wait();
        assert!(start.elapsed() >= Duration::from_millis(40));
    }
}
