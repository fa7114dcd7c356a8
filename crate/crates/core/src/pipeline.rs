//! End-to-end run: extract, prune, build, persist.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::dominate::{prune_with, PruneReport, RuleSet};
use crate::error::{Error, Result};
use crate::extract::Extractor;
use crate::graphstore::{self, build_graph, ConceptGraph};
use crate::triple::{self, Triple};

pub const GRAPH_FILE: &str = "graph.spg";
pub const REPORT_FILE: &str = "prune_report.json";
pub const RAW_TRIPLES_FILE: &str = "triples_raw.jsonl";
pub const PRUNED_TRIPLES_FILE: &str = "triples_pruned.jsonl";
pub const RUN_FILE: &str = "run.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RunStatus {
    Pending,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Extract,
    Prune,
    Build,
    Persist,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Extract => "extract",
            Stage::Prune => "prune",
            Stage::Build => "build",
            Stage::Persist => "persist",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounters {
    pub documents: usize,
    pub sentences: usize,
    pub mentions: usize,
    pub raw_triples: usize,
    pub pruned_triples: usize,
    pub nodes: usize,
    pub edges: usize,
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub extract_ms: f64,
    pub prune_ms: f64,
    pub build_ms: f64,
    pub persist_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: Stage,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineRun {
    pub run_id: String,
    pub status: RunStatus,
    pub counters: StageCounters,
    pub timings: StageTimings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<StageFailure>,
}

impl PipelineRun {
    pub fn pending(run_id: impl Into<String>) -> Self {
        PipelineRun {
            run_id: run_id.into(),
            status: RunStatus::Pending,
            counters: StageCounters::default(),
            timings: StageTimings::default(),
            failure: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOptions {
    pub rules: RuleSet,
}

/// Everything a completed run produced.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub run: PipelineRun,
    pub raw_triples: Vec<Triple>,
    pub pruned_triples: Vec<Triple>,
    pub report: PruneReport,
    pub graph: ConceptGraph,
    pub dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{} stage failed: {source}", .run.failure.as_ref().map(|f| f.stage.to_string()).unwrap_or_default())]
    Stage {
        run: Box<PipelineRun>,
        #[source]
        source: Error,
    },
}

/// Runs every stage over `corpus` and persists the artifacts under
/// `store/<run_id>/`. Artifacts appear all at once or not at all.
pub fn run_pipeline(
    corpus: &Corpus,
    extractor: &Extractor,
    options: &PipelineOptions,
    store: &Path,
    run_id: &str,
) -> std::result::Result<PipelineOutput, PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::EmptyCorpus);
    }
    let mut run = PipelineRun::pending(run_id);
    run.status = RunStatus::Running;
    run.counters.documents = corpus.len();

    let fail = |mut run: PipelineRun, stage: Stage, source: Error| {
        run.status = RunStatus::Failed;
        run.failure = Some(StageFailure {
            stage,
            message: source.to_string(),
        });
        PipelineError::Stage {
            run: Box::new(run),
            source,
        }
    };

    let clock = Instant::now();
    let extractions = extractor.extract_corpus(corpus);
    let mut raw_triples: Vec<Triple> = extractions
        .iter()
        .flat_map(|d| d.triples.iter().cloned())
        .collect();
    triple::sort_by_key(&mut raw_triples);
    run.counters.sentences = extractions.iter().map(|d| d.sentences).sum();
    run.counters.mentions = extractions.iter().map(|d| d.mention_count()).sum();
    run.counters.raw_triples = raw_triples.len();
    run.timings.extract_ms = ms(clock);

    let clock = Instant::now();
    let (pruned_triples, report) = prune_with(&raw_triples, options.rules);
    run.counters.pruned_triples = pruned_triples.len();
    run.timings.prune_ms = ms(clock);

    let clock = Instant::now();
    let graph = match build_graph(&pruned_triples, corpus) {
        Ok(g) => g,
        Err(e) => return Err(fail(run, Stage::Build, e)),
    };
    run.counters.nodes = graph.node_count();
    run.counters.edges = graph.edge_count();
    run.timings.build_ms = ms(clock);

    let clock = Instant::now();
    run.status = RunStatus::Done;
    let dir = store.join(run_id);
    if let Err(e) = persist(&dir, &run, &raw_triples, &pruned_triples, &report, &graph) {
        return Err(fail(run, Stage::Persist, e));
    }
    run.timings.persist_ms = ms(clock);
    // Rewrite the record so it carries the persist timing; the directory is already in place.
    let tmp = dir.join(format!(".{RUN_FILE}.tmp"));
    if write_file(&tmp, &run_json(&run)).is_ok() {
        let _ = fs::rename(&tmp, dir.join(RUN_FILE));
    }

    Ok(PipelineOutput {
        run,
        raw_triples,
        pruned_triples,
        report,
        graph,
        dir,
    })
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

fn run_json(run: &PipelineRun) -> String {
    serde_json::to_string_pretty(run).expect("run record serializes")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes into a staging directory, then renames it over `dir`.
fn persist(
    dir: &Path,
    run: &PipelineRun,
    raw: &[Triple],
    pruned: &[Triple],
    report: &PruneReport,
    graph: &ConceptGraph,
) -> Result<()> {
    let parent = dir.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let name = dir.file_name().and_then(|n| n.to_str()).unwrap_or("run");
    let staging = parent.join(format!(".{name}.partial"));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    }
    fs::create_dir_all(&staging).map_err(|e| Error::io(&staging, e))?;
    let result = (|| {
        write_file(&staging.join(GRAPH_FILE), &graphstore::serialize(graph))?;
        write_file(&staging.join(REPORT_FILE), &report.to_json())?;
        write_file(&staging.join(RAW_TRIPLES_FILE), &triple::to_jsonl(raw))?;
        write_file(
            &staging.join(PRUNED_TRIPLES_FILE),
            &triple::to_jsonl(pruned),
        )?;
        write_file(&staging.join(RUN_FILE), &run_json(run))?;
        if dir.exists() {
            fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        fs::rename(&staging, dir).map_err(|e| Error::io(dir, e))
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}

/// A persisted run read back from its directory.
#[derive(Debug, Clone)]
pub struct StoredRun {
    pub run: PipelineRun,
    pub raw_triples: Vec<Triple>,
    pub pruned_triples: Vec<Triple>,
    pub report: PruneReport,
    pub graph: ConceptGraph,
}

pub fn load_run(dir: &Path) -> Result<StoredRun> {
    let read = |name: &str| {
        let p = dir.join(name);
        fs::read_to_string(&p).map_err(|e| Error::io(&p, e))
    };
    Ok(StoredRun {
        run: serde_json::from_str(&read(RUN_FILE)?)?,
        raw_triples: triple::parse_triples(&read(RAW_TRIPLES_FILE)?, &dir.join(RAW_TRIPLES_FILE))?,
        pruned_triples: triple::parse_triples(
            &read(PRUNED_TRIPLES_FILE)?,
            &dir.join(PRUNED_TRIPLES_FILE),
        )?,
        report: serde_json::from_str(&read(REPORT_FILE)?)?,
        graph: graphstore::load(&dir.join(GRAPH_FILE))?,
    })
}

/// Completed runs under `store`, oldest first by run id.
pub fn list_runs(store: &Path) -> Vec<PathBuf> {
    let Ok(entries) = fs::read_dir(store) else {
        return Vec::new();
    };
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.join(RUN_FILE).is_file())
        .filter(|p| {
            !p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with('.'))
        })
        .collect();
    dirs.sort();
    dirs
}
