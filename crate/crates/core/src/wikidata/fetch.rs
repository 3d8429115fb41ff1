use std::collections::{HashSet, VecDeque};

use thiserror::Error;

use super::discover::QueryError;
use super::query::{Query, QueryTransport, TransportError};
use super::{LabelKind, Qid, RawNameRecord};
use crate::model::Language;

/// The public endpoint cancels queries after one minute.
pub const MAX_TIMEOUT_SECS: u64 = 60;
/// Pages are not shrunk below this size; the type list is split instead.
pub const MIN_PAGE_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchPlan {
    pub tag: String,
    pub types: Vec<Qid>,
    pub language: Language,
    pub page_size: usize,
    pub endpoint: String,
    pub timeout_secs: u64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FetchError {
    #[error("invalid fetch plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Query(#[from] QueryError),
}

impl FetchPlan {
    pub fn validate(&self) -> Result<(), FetchError> {
        if self.page_size == 0 {
            return Err(FetchError::Plan("page size must be positive".into()));
        }
        if self.timeout_secs == 0 || self.timeout_secs > MAX_TIMEOUT_SECS {
            return Err(FetchError::Plan(format!(
                "time budget must be between 1 and {MAX_TIMEOUT_SECS} seconds"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FetchProgress {
    pub queries: usize,
    pub records: usize,
    /// Rows already returned by an earlier query.
    pub duplicates: usize,
    pub timeouts: usize,
    pub splits: usize,
}

#[derive(Debug, Clone)]
struct Task {
    types: Vec<Qid>,
    offset: usize,
    page_size: usize,
}

/// Streams the names of a plan page by page. Records are handed out as
/// soon as their page arrives; a failure ends the stream with one error
/// after everything fetched so far.
pub struct NameFetcher<T> {
    transport: T,
    language: Language,
    floor: usize,
    tasks: VecDeque<Task>,
    ready: VecDeque<RawNameRecord>,
    seen: HashSet<(Qid, LabelKind, String)>,
    progress: FetchProgress,
    done: bool,
}

pub fn fetch_names<T: QueryTransport>(plan: &FetchPlan, transport: T) -> Result<NameFetcher<T>, FetchError> {
    plan.validate()?;
    let mut tasks = VecDeque::new();
    if !plan.types.is_empty() {
        tasks.push_back(Task {
            types: plan.types.clone(),
            offset: 0,
            page_size: plan.page_size,
        });
    }
    Ok(NameFetcher {
        transport,
        language: plan.language,
        floor: MIN_PAGE_SIZE.min(plan.page_size),
        tasks,
        ready: VecDeque::new(),
        seen: HashSet::new(),
        progress: FetchProgress::default(),
        done: false,
    })
}

impl<T> NameFetcher<T> {
    pub fn progress(&self) -> FetchProgress {
        self.progress
    }
}

impl<T: QueryTransport> NameFetcher<T> {
    /// Runs the next query; `Err` ends the stream.
    fn step(&mut self) -> Result<(), QueryError> {
        let Some(task) = self.tasks.front_mut() else {
            return Ok(());
        };
        let query = Query::Names {
            types: task.types.clone(),
            language: self.language,
            limit: task.page_size,
            offset: task.offset,
        };
        self.progress.queries += 1;
        match self.transport.execute(&query) {
            Ok(result) => {
                let n = result.rows.len();
                if n < task.page_size {
                    self.tasks.pop_front();
                } else {
                    task.offset += n;
                }
                for row in &result.rows {
                    let parsed = (
                        row.get("item").and_then(|v| Qid::from_uri(v).ok()),
                        row.get("kind").map(String::as_str),
                        row.get("name"),
                    );
                    let (Some(entity), Some(kind), Some(text)) = parsed else {
                        continue;
                    };
                    let kind = match kind {
                        "canonical" => LabelKind::Canonical,
                        "alias" => LabelKind::Alias,
                        _ => continue,
                    };
                    if self.seen.insert((entity, kind, text.clone())) {
                        self.progress.records += 1;
                        self.ready.push_back(RawNameRecord {
                            entity,
                            kind,
                            text: text.clone(),
                            language: self.language,
                        });
                    } else {
                        self.progress.duplicates += 1;
                    }
                }
                Ok(())
            }
            Err(TransportError::Timeout) if task.page_size > self.floor => {
                self.progress.timeouts += 1;
                task.page_size = (task.page_size / 2).max(self.floor);
                Ok(())
            }
            Err(TransportError::Timeout) if task.types.len() > 1 => {
                // Restart each type on its own; rows already seen are
                // filtered by the seen set.
                self.progress.timeouts += 1;
                self.progress.splits += 1;
                let task = self.tasks.pop_front().expect("front exists");
                for (i, t) in task.types.into_iter().enumerate() {
                    self.tasks.insert(
                        i,
                        Task {
                            types: vec![t],
                            offset: 0,
                            page_size: task.page_size,
                        },
                    );
                }
                Ok(())
            }
            Err(source) => Err(QueryError {
                query: query.text(),
                source,
            }),
        }
    }
}

impl<T: QueryTransport> Iterator for NameFetcher<T> {
    type Item = Result<RawNameRecord, QueryError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some(r) = self.ready.pop_front() {
                return Some(Ok(r));
            }
            if self.done || self.tasks.is_empty() {
                return None;
            }
            if let Err(e) = self.step() {
                self.done = true;
                return Some(Err(e));
            }
        }
    }
}
