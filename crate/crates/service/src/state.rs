//! Shared service state: the staged corpus, run records and the graph
//! snapshot readers see.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use conceptmap_core::analytics::{closeness_centrality_with, CentralityTable};
use conceptmap_core::corpus::{Corpus, IngestOptions};
use conceptmap_core::dominate::PruneReport;
use conceptmap_core::extract::Extractor;
use conceptmap_core::graphstore::ConceptGraph;
use conceptmap_core::pipeline::{
    list_runs, load_run, run_pipeline, PipelineError, PipelineOptions, PipelineRun, RunStatus,
    REPORT_FILE, RUN_FILE,
};
use conceptmap_core::triple::Triple;

use crate::config::Config;

const STAGED_FILE: &str = "staged.jsonl";

/// An immutable view of one completed run.
#[derive(Debug, Default)]
pub struct Snapshot {
    pub run: Option<PipelineRun>,
    pub graph: ConceptGraph,
    pub raw_triples: Vec<Triple>,
    pub pruned_triples: Vec<Triple>,
    centrality: [OnceLock<CentralityTable>; 2],
}

impl Snapshot {
    pub fn new(
        run: Option<PipelineRun>,
        graph: ConceptGraph,
        raw: Vec<Triple>,
        pruned: Vec<Triple>,
    ) -> Self {
        Snapshot {
            run,
            graph,
            raw_triples: raw,
            pruned_triples: pruned,
            centrality: Default::default(),
        }
    }

    /// Closeness scores, computed once per snapshot and direction mode.
    pub fn centrality(&self, directed: bool) -> &CentralityTable {
        self.centrality[usize::from(directed)]
            .get_or_init(|| closeness_centrality_with(&self.graph, directed))
    }
}

struct RunEntry {
    run: PipelineRun,
    report: Option<Arc<PruneReport>>,
}

/// Why a run could not start.
#[derive(Debug, PartialEq, Eq)]
pub enum StartError {
    NoDocuments,
    Busy(String),
}

pub struct AppState {
    pub config: Config,
    extractor: Arc<Extractor>,
    staged: Mutex<Option<Corpus>>,
    snapshot: RwLock<Arc<Snapshot>>,
    runs: Mutex<BTreeMap<String, RunEntry>>,
    active: Mutex<Option<String>>,
    counter: AtomicU64,
}

impl AppState {
    /// Opens the store, loading staged documents, run records and the most
    /// recent completed run. A corrupt store is an error.
    pub fn open(config: Config) -> Result<Arc<AppState>> {
        let extractor = Arc::new(config.extractor()?);
        fs::create_dir_all(&config.store)
            .with_context(|| format!("creating store {}", config.store.display()))?;

        let staged_path = config.store.join(STAGED_FILE);
        let staged = if staged_path.is_file() {
            let text = fs::read_to_string(&staged_path)?;
            Some(Corpus::parse_jsonl(
                &text,
                &staged_path,
                &IngestOptions::default(),
            )?)
        } else {
            None
        };

        let mut runs = BTreeMap::new();
        let mut snapshot = Snapshot::default();
        let dirs = list_runs(&config.store);
        for dir in &dirs {
            let text = fs::read_to_string(dir.join(RUN_FILE))?;
            let run: PipelineRun = serde_json::from_str(&text)
                .with_context(|| format!("reading {}", dir.join(RUN_FILE).display()))?;
            runs.insert(run.run_id.clone(), RunEntry { run, report: None });
        }
        if let Some(latest) = dirs.last() {
            let stored =
                load_run(latest).with_context(|| format!("loading run {}", latest.display()))?;
            snapshot = Snapshot::new(
                Some(stored.run),
                stored.graph,
                stored.raw_triples,
                stored.pruned_triples,
            );
        }
        Ok(Arc::new(AppState {
            config,
            extractor,
            staged: Mutex::new(staged),
            snapshot: RwLock::new(Arc::new(snapshot)),
            runs: Mutex::new(runs),
            active: Mutex::new(None),
            counter: AtomicU64::new(0),
        }))
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    pub fn staged_count(&self) -> usize {
        self.staged
            .lock()
            .expect("staged lock")
            .as_ref()
            .map_or(0, Corpus::len)
    }

    /// Adds documents to the staged corpus, persisting it.
    pub fn stage(&self, incoming: Corpus) -> conceptmap_core::Result<usize> {
        let mut staged = self.staged.lock().expect("staged lock");
        let merged = match staged.as_ref() {
            Some(current) => current.merge(&incoming)?,
            None => incoming,
        };
        let path = self.config.store.join(STAGED_FILE);
        let tmp = self.config.store.join(format!(".{STAGED_FILE}.tmp"));
        merged.write_jsonl(&tmp)?;
        fs::rename(&tmp, &path).map_err(|e| conceptmap_core::Error::Io { path, source: e })?;
        let total = merged.len();
        *staged = Some(merged);
        Ok(total)
    }

    pub fn active_run(&self) -> Option<String> {
        self.active.lock().expect("active lock").clone()
    }

    pub fn run(&self, id: &str) -> Option<PipelineRun> {
        self.runs
            .lock()
            .expect("runs lock")
            .get(id)
            .map(|e| e.run.clone())
    }

    /// The prune report of a completed run, from memory or the store.
    pub fn report(&self, id: &str) -> Option<Arc<PruneReport>> {
        let mut runs = self.runs.lock().expect("runs lock");
        let entry = runs.get_mut(id)?;
        if entry.run.status != RunStatus::Done {
            return None;
        }
        if entry.report.is_none() {
            let path = self.run_dir(id)?.join(REPORT_FILE);
            let report: PruneReport = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
            entry.report = Some(Arc::new(report));
        }
        entry.report.clone()
    }

    fn run_dir(&self, id: &str) -> Option<PathBuf> {
        let safe = !id.is_empty()
            && id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
        safe.then(|| self.config.store.join(id))
    }

    fn next_run_id(&self) -> String {
        let millis = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0);
        let n = self.counter.fetch_add(1, Ordering::SeqCst);
        format!("run-{millis:013}-{n:04}")
    }

    /// Claims the single run slot and records a RUNNING run. The caller
    /// executes it with [`AppState::execute`].
    pub fn begin_run(&self) -> Result<(PipelineRun, Corpus), StartError> {
        let mut active = self.active.lock().expect("active lock");
        if let Some(id) = active.as_ref() {
            return Err(StartError::Busy(id.clone()));
        }
        let corpus = self
            .staged
            .lock()
            .expect("staged lock")
            .clone()
            .ok_or(StartError::NoDocuments)?;
        let mut run = PipelineRun::pending(self.next_run_id());
        run.status = RunStatus::Running;
        run.counters.documents = corpus.len();
        self.runs.lock().expect("runs lock").insert(
            run.run_id.clone(),
            RunEntry {
                run: run.clone(),
                report: None,
            },
        );
        *active = Some(run.run_id.clone());
        Ok((run, corpus))
    }

    /// Runs the pipeline for a run started by [`AppState::begin_run`], then
    /// publishes the new snapshot and frees the slot. Blocking.
    pub fn execute(&self, run_id: &str, corpus: &Corpus) -> PipelineRun {
        let options = PipelineOptions {
            rules: self.config.rules(),
        };
        let result = run_pipeline(
            corpus,
            &self.extractor,
            &options,
            &self.config.store,
            run_id,
        );
        let (record, report) = match result {
            Ok(out) => {
                let snapshot = Snapshot::new(
                    Some(out.run.clone()),
                    out.graph,
                    out.raw_triples,
                    out.pruned_triples,
                );
                *self.snapshot.write().expect("snapshot lock") = Arc::new(snapshot);
                (out.run, Some(Arc::new(out.report)))
            }
            Err(PipelineError::Stage { run, source }) => {
                log::error!("run {run_id} failed: {source}");
                (*run, None)
            }
            Err(e @ PipelineError::EmptyCorpus) => {
                log::error!("run {run_id} failed: {e}");
                let mut run = PipelineRun::pending(run_id);
                run.status = RunStatus::Failed;
                (run, None)
            }
        };
        self.runs.lock().expect("runs lock").insert(
            run_id.to_string(),
            RunEntry {
                run: record.clone(),
                report,
            },
        );
        *self.active.lock().expect("active lock") = None;
        record
    }

    pub fn store(&self) -> &Path {
        &self.config.store
    }
}
