use std::path::{Path, PathBuf};
use std::time::Instant;

use conceptmap_core::analytics::{query_relations, shortest_path};
use conceptmap_core::corpus::{ingest_path, CorpusFormat};
use conceptmap_core::extract::Extractor;
use conceptmap_core::pipeline::{run_pipeline, RunStatus, GRAPH_FILE};
use conceptmap_core::synth::synthetic_corpus;

fn demo_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo/corpus.jsonl")
}

#[test]
fn demo_graph_supports_the_documented_queries() {
    let corpus = ingest_path(&demo_path(), CorpusFormat::Jsonl, &Default::default()).unwrap();
    let store = tempfile::tempdir().unwrap();
    let out = run_pipeline(
        &corpus,
        &Extractor::default(),
        &Default::default(),
        store.path(),
        "demo",
    )
    .unwrap();
    let g = &out.graph;
    for e in g.edges() {
        eprintln!(
            "{} -[{}]-> {}",
            g.nodes()[e.source].display_name,
            e.relation_label,
            g.nodes()[e.target].display_name
        );
    }
    let tupak = g.find_node("Tupak Sumatra").expect("Tupak Sumatra node");
    let program = g
        .find_node("Israeli government's biological warfare program")
        .expect("program node");
    let path = shortest_path(g, tupak, program, false).unwrap();
    assert!(path.nodes.len() >= 3, "{path:?}");

    let preach = query_relations(g, "preach");
    assert!(!preach.edges.is_empty());
    assert!(preach
        .edges
        .iter()
        .all(|e| e.relation_tokens.iter().any(|t| t == "preach")));

    let travel = query_relations(g, "travel");
    assert!(travel
        .edges
        .iter()
        .any(|e| e.relation_label.starts_with("traveled to")));
}

#[test]
fn thousand_document_corpus_runs_under_a_minute() {
    let corpus = synthetic_corpus(1000, 2024);
    let store = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = run_pipeline(
        &corpus,
        &Extractor::default(),
        &Default::default(),
        store.path(),
        "big",
    )
    .unwrap();
    let elapsed = start.elapsed();
    eprintln!("{:?} in {elapsed:?}", out.run.counters);
    assert_eq!(out.run.status, RunStatus::Done);
    assert!(elapsed.as_secs_f64() < 60.0);
    assert!(out.run.counters.pruned_triples <= out.run.counters.raw_triples);

    let again = run_pipeline(
        &corpus,
        &Extractor::default(),
        &Default::default(),
        store.path(),
        "big2",
    )
    .unwrap();
    let read = |d: &Path| std::fs::read(d.join(GRAPH_FILE)).unwrap();
    assert_eq!(read(&out.dir), read(&again.dir));
}
