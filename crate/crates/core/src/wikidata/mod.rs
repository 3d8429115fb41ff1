//! Name retrieval from Wikidata: type discovery and mapping, SPARQL
//! paging, and streaming dump scans.
//!
//! Network access goes through [`QueryTransport`], so everything here can
//! run against [`RecordedTransport`] fixtures or the in-memory
//! [`MockGraph`].

mod discover;
mod dump;
mod fetch;
mod mock;
mod query;
mod record;
mod typemap;

pub use discover::{build_type_map, discover_instantiated_subtypes, read_target_roots, QueryError, DEFAULT_TYPE_ROOTS};
pub use dump::{scan_dump, DumpScanner, DumpStats, DEFAULT_MAX_LINE};
pub use fetch::{fetch_names, FetchError, FetchPlan, FetchProgress, NameFetcher, MAX_TIMEOUT_SECS, MIN_PAGE_SIZE};
pub use mock::MockGraph;
pub use query::{
    Exchange, HttpTransport, Query, QueryResult, QueryTransport, RateGate, RecordedTransport, Recorder,
    TransportError, DEFAULT_ENDPOINT,
};
pub use record::{LabelKind, Qid, QidError, RawNameRecord};
pub use typemap::{resolve_target_types, TypeMap, TypeMapError};
