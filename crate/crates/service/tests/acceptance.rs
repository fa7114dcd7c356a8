//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::TestServer;
use conceptmap_core::analytics::{closeness_centrality_with, query_relations, shortest_path};
use conceptmap_core::corpus::{ingest_path, Corpus, CorpusFormat, Document};
use conceptmap_core::dominate::prune;
use conceptmap_core::extract::{EntityClass, Extractor};
use conceptmap_core::graphstore::{
    build_graph, load, parse, save, serialize, to_json, ConceptGraph, Edge, Node,
};
use conceptmap_core::pipeline::{run_pipeline, RunStatus, GRAPH_FILE};
use conceptmap_core::synth::{stress_triples, synthetic_corpus, StressSpec};
use conceptmap_core::triple::{import_triples, to_jsonl, Triple, TripleKey};
use conceptmap_testkit::prune::{prune_pairwise, prune_sweep, OracleTriple};
use conceptmap_testkit::{gen, gold, graph as oracle};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn core_data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel)
}

fn to_core(t: &OracleTriple) -> Triple {
    Triple::new(
        &t.subject,
        &t.relation,
        &t.object,
        &t.key.0,
        t.key.1,
        t.key.2,
    )
}

fn to_oracle(t: &Triple) -> OracleTriple {
    OracleTriple {
        subject: t.subject.clone(),
        relation: t.relation.clone(),
        object: t.object.clone(),
        key: (t.doc_id.clone(), t.sentence_index, t.triple_index),
    }
}

fn keys(ts: &[Triple]) -> Vec<(String, usize, usize)> {
    ts.iter()
        .map(|t| (t.doc_id.clone(), t.sentence_index, t.triple_index))
        .collect()
}

fn domination_reduction() -> Outcome {
    let path = core_data("stress/stress_8603.jsonl");
    let bundled = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    ensure!(
        bundled == to_jsonl(&stress_triples(&StressSpec::default())),
        "bundled file differs from generator output"
    );
    let triples = import_triples(&path).map_err(|e| e.to_string())?;
    ensure!(
        triples.len() == 8603,
        "stress file has {} records",
        triples.len()
    );
    let start = Instant::now();
    let (kept, report) = prune(&triples);
    let elapsed = start.elapsed().as_secs_f64();
    let ratio = report.survivor_ratio();
    ensure!(
        (ratio - 0.511).abs() <= 0.05,
        "survivor ratio {ratio:.4} outside 0.511 +/- 0.05"
    );
    ensure!(elapsed < 10.0, "prune took {elapsed:.2} s");
    let reference = prune_sweep(&triples.iter().map(to_oracle).collect::<Vec<_>>());
    ensure!(
        keys(&kept) == reference,
        "survivor set differs from the fixed-point oracle"
    );
    Ok(format!(
        "8603 -> {} ({:.2}% kept) in {:.0} ms, oracle-identical",
        kept.len(),
        100.0 * ratio,
        elapsed * 1e3
    ))
}

fn domination_properties() -> Outcome {
    for seed in 0..500u64 {
        let set = gen::triple_set(&mut gen::rng(seed), 30);
        let core: Vec<Triple> = set.iter().map(to_core).collect();
        let (kept, _) = prune(&core);
        ensure!(
            keys(&kept) == prune_pairwise(&set),
            "seed {seed}: differs from pair-recheck oracle"
        );
        let (again, _) = prune(&kept);
        ensure!(keys(&again) == keys(&kept), "seed {seed}: not idempotent");
        let (permuted, _) = prune(&gen::shuffled(&core, seed ^ 0x5eed));
        ensure!(
            keys(&permuted) == keys(&kept),
            "seed {seed}: depends on input order"
        );
    }
    Ok("500 seeds: oracle-equal, idempotent, permutation-invariant".into())
}

fn synthetic_graph(n: usize, edges: &[(usize, usize)]) -> ConceptGraph {
    let nodes = (0..n)
        .map(|i| Node {
            node_id: i,
            canonical_name: format!("n{i:02}"),
            display_name: format!("N{i:02}"),
            entity_class: EntityClass::Unknown,
            locations: Default::default(),
            mention_count: 1,
        })
        .collect();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| Edge {
            edge_id: i,
            source: s,
            target: t,
            relation_label: format!("r{i}"),
            relation_tokens: vec![format!("r{i}")],
            location: None,
            provenance: vec![TripleKey {
                doc_id: "d".into(),
                sentence_index: i,
                triple_index: 0,
            }],
        })
        .collect();
    ConceptGraph::from_parts(nodes, edges).expect("generated graph is valid")
}

fn pathfinding_oracle() -> Outcome {
    let mut pairs = 0;
    for seed in 0..100u64 {
        let (n, edges) = gen::graph(&mut gen::rng(seed), 12);
        let g = synthetic_graph(n, &edges);
        for directed in [false, true] {
            let dist = oracle::all_pairs(n, &edges, directed);
            for s in 0..n {
                for t in 0..n {
                    let p = shortest_path(&g, s, t, directed).map_err(|e| e.to_string())?;
                    let again = shortest_path(&g, s, t, directed).map_err(|e| e.to_string())?;
                    ensure!(p == again, "seed {seed} {s}->{t}: nondeterministic");
                    match dist[s][t] {
                        None => {
                            ensure!(p.is_empty(), "seed {seed} {s}->{t}: path where none exists")
                        }
                        Some(d) => ensure!(
                            p.total_cost == d as f64 && p.nodes.len() == d + 1,
                            "seed {seed} {s}->{t}: cost {} vs {d}",
                            p.total_cost
                        ),
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("100 graphs, {pairs} ordered pairs in both modes"))
}

fn centrality_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let (n, edges) = gen::graph(&mut gen::rng(seed), 12);
        let g = synthetic_graph(n, &edges);
        for directed in [false, true] {
            let want = oracle::closeness(&oracle::all_pairs(n, &edges, directed));
            let got = closeness_centrality_with(&g, directed);
            for v in 0..n {
                let diff = (got.scores[v] - want[v]).abs();
                worst = worst.max(diff);
                ensure!(
                    diff <= 1e-9,
                    "seed {seed} node {v}: {} vs {}",
                    got.scores[v],
                    want[v]
                );
            }
            ensure!(
                got.ranking() == oracle::ranking(&want),
                "seed {seed}: ranking differs"
            );
        }
    }
    Ok(format!("100 graphs, max deviation {worst:.1e}"))
}

fn one_doc(body: &str) -> Corpus {
    Corpus::from_documents(
        [(Document::new("example", body), "inline".to_string())],
        &Default::default(),
    )
    .expect("valid document")
}

fn worked_examples() -> Outcome {
    let extractor = Extractor::default();

    let corpus = one_doc("The men spoke to their leader.");
    let triples: Vec<Triple> = extractor
        .extract_corpus(&corpus)
        .into_iter()
        .flat_map(|d| d.triples)
        .collect();
    let g = build_graph(&triples, &corpus).map_err(|e| e.to_string())?;
    ensure!(
        g.edge_count() == 1 && g.node_count() == 2,
        "{} nodes, {} edges",
        g.node_count(),
        g.edge_count()
    );
    let e = &g.edges()[0];
    let (src, tgt) = (
        &g.nodes()[e.source].canonical_name,
        &g.nodes()[e.target].canonical_name,
    );
    ensure!(
        e.relation_label == "spoke to",
        "relation {:?}",
        e.relation_label
    );
    ensure!(
        src == "men" && tgt == "their leader",
        "edge {src:?} -> {tgt:?}"
    );

    let corpus =
        one_doc("The group of soldiers left the bunker yesterday. They returned this morning.");
    let doc = &corpus.documents()[0];
    let map = extractor.resolve_coreferences(doc);
    let resolved: Vec<(String, String)> = map
        .entries()
        .iter()
        .map(|(p, a)| (p.surface.clone(), a.surface.to_lowercase()))
        .collect();
    ensure!(
        resolved == [("They".to_string(), "the group of soldiers".to_string())],
        "resolution {resolved:?}"
    );

    let corpus = ingest_path(
        &core_data("demo/corpus.jsonl"),
        CorpusFormat::Jsonl,
        &Default::default(),
    )
    .map_err(|e| e.to_string())?;
    let store = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = run_pipeline(
        &corpus,
        &extractor,
        &Default::default(),
        store.path(),
        "demo",
    )
    .map_err(|e| e.to_string())?;
    let travel = query_relations(&out.graph, "travel");
    ensure!(
        travel
            .edges
            .iter()
            .any(|e| e.relation_label.starts_with("traveled to")),
        "no 'traveled to' edge matched"
    );
    Ok(format!(
        "'spoke to' edge, They -> the group of soldiers, travel matched {} edges",
        travel.edges.len()
    ))
}

fn extraction_recall() -> Outcome {
    let corpus = ingest_path(
        &core_data("gold/reports.jsonl"),
        CorpusFormat::Jsonl,
        &Default::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(
        corpus.len() == 20,
        "gold corpus has {} reports",
        corpus.len()
    );
    let extracted: Vec<(String, String, String, String)> = Extractor::default()
        .extract_corpus(&corpus)
        .into_iter()
        .flat_map(|d| d.triples)
        .map(|t| (t.doc_id, t.subject, t.relation, t.object))
        .collect();
    let recall = gold::triple_recall(
        &gold::load_triples(&core_data("gold/triples.jsonl")),
        &extracted,
    );
    ensure!(recall.value() >= 0.75, "recall {:.3}", recall.value());
    Ok(format!(
        "recall {}/{} = {:.3} on the constructed proxy corpus",
        recall.matched,
        recall.total,
        recall.value()
    ))
}

fn determinism_and_persistence() -> Outcome {
    let corpus = synthetic_corpus(1000, 2024);
    let store = tempfile::tempdir().map_err(|e| e.to_string())?;
    let extractor = Extractor::default();
    let start = Instant::now();
    let first = run_pipeline(&corpus, &extractor, &Default::default(), store.path(), "a")
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(
        first.run.status == RunStatus::Done,
        "status {:?}",
        first.run.status
    );
    ensure!(elapsed < 60.0, "1000 documents took {elapsed:.1} s");
    let second = run_pipeline(&corpus, &extractor, &Default::default(), store.path(), "b")
        .map_err(|e| e.to_string())?;
    let read = |d: &Path| std::fs::read(d.join(GRAPH_FILE)).map_err(|e| e.to_string());
    ensure!(
        read(&first.dir)? == read(&second.dir)?,
        "graph files differ between runs"
    );

    let loaded = load(&first.dir.join(GRAPH_FILE)).map_err(|e| e.to_string())?;
    ensure!(loaded == first.graph, "load(save(g)) != g");
    let copy = store.path().join("copy.spg");
    save(&loaded, &copy).map_err(|e| e.to_string())?;
    ensure!(
        read(&first.dir)? == std::fs::read(&copy).map_err(|e| e.to_string())?,
        "resave changed bytes"
    );
    ensure!(
        parse(&serialize(&loaded)).map_err(|e| e.to_string())? == loaded,
        "parse(serialize(g)) != g"
    );
    Ok(format!(
        "1000 docs in {elapsed:.2} s ({} nodes, {} edges), byte-identical reruns, roundtrip identity",
        first.graph.node_count(),
        first.graph.edge_count()
    ))
}

async fn api_contract_checks() -> Outcome {
    let server = TestServer::start().await;
    let (status, health) = server.get("/api/health").await;
    ensure!(
        status == 200 && health["version"].is_string(),
        "health {status} {health}"
    );

    let (status, err) = server
        .post_body("/api/documents", "{\"doc_id\":\"x\"\n")
        .await;
    ensure!(
        status == 400 && err["code"] == "invalid_upload" && err["detail"]["line"] == 1,
        "malformed upload {status} {err}"
    );

    let run = server.run_demo().await;
    ensure!(run["status"] == "DONE", "run {run}");
    let run_id = run["run_id"].as_str().unwrap_or_default().to_string();

    let graph = load(&server.store.join(&run_id).join(GRAPH_FILE)).map_err(|e| e.to_string())?;
    let export: Value = serde_json::from_str(&to_json(&graph)).map_err(|e| e.to_string())?;
    let (status, page) = server.get("/api/graph").await;
    ensure!(
        status == 200 && page["nodes"] == export["nodes"] && page["edges"] == export["edges"],
        "graph page differs from export"
    );
    let (_, small) = server.get("/api/graph?limit=3&offset=1").await;
    ensure!(
        small["nodes"].as_array().map(Vec::len) == Some(3),
        "limited page {small}"
    );

    let (status, path) = server
        .get("/api/graph/path?source=Tupak%20Sumatra&target=Hassan%20Karimi")
        .await;
    ensure!(
        status == 200 && path["total_cost"].is_number(),
        "path {status} {path}"
    );
    let (status, err) = server
        .get("/api/graph/path?source=Tupak%20Sumatra&target=Nobody%20Known")
        .await;
    ensure!(
        status == 404
            && err["code"] == "unknown_node"
            && err["message"]
                .as_str()
                .is_some_and(|m| m.contains("Nobody Known")),
        "unknown node {status} {err}"
    );

    let (status, table) = server.get("/api/graph/centrality").await;
    ensure!(
        status == 200 && table["scores"].as_array().map(Vec::len) == Some(graph.node_count()),
        "centrality {status}"
    );
    let (status, sub) = server.get("/api/graph/query?relation=preach").await;
    ensure!(
        status == 200 && sub["edges"].as_array().is_some_and(|e| !e.is_empty()),
        "query {status} {sub}"
    );

    for (stage, counter) in [("raw", "raw_triples"), ("pruned", "pruned_triples")] {
        let (status, page) = server.get(&format!("/api/triples?stage={stage}")).await;
        ensure!(
            status == 200 && page["total"] == run["counters"][counter],
            "triples {stage} {status}"
        );
    }
    let (status, report) = server.get(&format!("/api/runs/{run_id}/report")).await;
    ensure!(
        status == 200 && report["output_count"] == run["counters"]["pruned_triples"],
        "report {status}"
    );
    server.stop().await.map_err(|e| e.to_string())?;
    Ok(
        "health, upload errors, graph page, path, unknown node, centrality, query, triples, report"
            .into(),
    )
}

fn api_contract() -> Outcome {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    runtime.block_on(api_contract_checks())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("domination reduction", domination_reduction),
        ("domination properties", domination_properties),
        ("pathfinding oracle", pathfinding_oracle),
        ("centrality oracle", centrality_oracle),
        ("worked examples", worked_examples),
        ("extraction recall proxy", extraction_recall),
        ("determinism and persistence", determinism_and_persistence),
        ("api contract", api_contract),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(summary) => writeln!(out, "PASS  {name}: {summary}"),
            Err(reason) => {
                failed += 1;
                writeln!(out, "FAIL  {name}: {reason}")
            }
        }
        .expect("stdout");
    }
    writeln!(
        out,
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    )
    .expect("stdout");
    if failed > 0 {
        std::process::exit(1);
    }
}
