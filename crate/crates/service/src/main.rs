use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use conceptmap_core::analytics::{closeness_centrality_with, query_relations, shortest_path};
use conceptmap_core::corpus::{ingest_path, Corpus, CorpusFormat, IngestOptions};
use conceptmap_core::dominate::{prune_with, Rule};
use conceptmap_core::graphstore::{self, build_graph, ConceptGraph, ExportFormat, NodeId};
use conceptmap_core::pipeline::{list_runs, run_pipeline, PipelineOptions, GRAPH_FILE};
use conceptmap_core::synth::{stress_triples, synthetic_corpus, StressSpec};
use conceptmap_core::triple::{import_triples, sort_by_key, to_jsonl};
use conceptmap_service::{router, serve_on, AppState, Config};

#[derive(Parser)]
#[command(
    name = "conceptmap",
    version,
    about = "Build and query concept maps from report text"
)]
struct Cli {
    /// TOML settings file; CONCEPTMAP_* variables override it.
    #[arg(long, global = true, env = "CONCEPTMAP_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Plain,
    Jsonl,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file to read; defaults to the latest run in the store.
    #[arg(long)]
    graph: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a directory of .txt files or a JSONL file and write a corpus file.
    Ingest {
        path: PathBuf,
        #[arg(long, value_enum)]
        format: Option<InputFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract relation triples from a corpus.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        /// Use triples from this file instead of running the extractor.
        #[arg(long)]
        import: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Remove dominated triples.
    Prune {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Rules to skip, e.g. `--disable R4`.
        #[arg(long, value_delimiter = ',')]
        disable: Vec<Rule>,
    },
    /// Build a graph file from a corpus and its pruned triples.
    Build {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        triples: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and store the result as a new run.
    Run {
        corpus: PathBuf,
        #[arg(long)]
        run_id: Option<String>,
    },
    /// Start the HTTP API.
    Serve,
    /// Write the graph as JSON or GraphML.
    Export {
        #[arg(long, default_value = "json")]
        format: ExportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Shortest path between two named nodes.
    Path {
        source: String,
        target: String,
        #[arg(long)]
        directed: bool,
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Rank nodes by closeness centrality.
    Centrality {
        #[arg(long, default_value_t = 10)]
        top: usize,
        #[arg(long)]
        directed: bool,
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Edges whose relation matches the query, with their endpoints.
    Query {
        relation: String,
        #[command(flatten)]
        graph: GraphArg,
    },
    /// Write generated test data.
    Generate {
        #[command(subcommand)]
        what: Generate,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// The redundancy stress triple file.
    Stress {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// A synthetic report corpus.
    Corpus {
        #[arg(long, default_value_t = 1000)]
        documents: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_corpus(path: &Path, format: Option<InputFormat>) -> Result<Corpus> {
    let format = match format {
        Some(InputFormat::Plain) => CorpusFormat::PlainDir,
        Some(InputFormat::Jsonl) => CorpusFormat::Jsonl,
        None if path.is_dir() => CorpusFormat::PlainDir,
        None => CorpusFormat::Jsonl,
    };
    Ok(ingest_path(path, format, &IngestOptions::default())?)
}

fn write_output(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_graph(config: &Config, arg: &GraphArg) -> Result<ConceptGraph> {
    let path = match &arg.graph {
        Some(p) => p.clone(),
        None => match list_runs(&config.store).last() {
            Some(dir) => dir.join(GRAPH_FILE),
            None => bail!(
                "no runs in {}; pass --graph or run the pipeline first",
                config.store.display()
            ),
        },
    };
    graphstore::load(&path).with_context(|| format!("loading {}", path.display()))
}

fn find(graph: &ConceptGraph, name: &str) -> Result<NodeId> {
    graph
        .find_node(name)
        .with_context(|| format!("unknown node {name:?}"))
}

fn new_run_id() -> String {
    let millis = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    format!("run-{millis:013}-cli")
}

async fn serve(config: Config) -> Result<()> {
    let addr = format!("{}:{}", config.host, config.port);
    let state = AppState::open(config)?;
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .with_context(|| format!("binding {addr}"))?;
    log::info!("listening on http://{}", listener.local_addr()?);
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
        log::info!("shutting down");
    };
    serve_on(listener, router(state), shutdown).await?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let config = Config::load(cli.config.as_deref())?;

    match cli.command {
        Command::Ingest { path, format, out } => {
            let corpus = read_corpus(&path, format)?;
            eprintln!("{} documents", corpus.len());
            write_output(out.as_deref(), &corpus.to_jsonl())?;
        }
        Command::Extract {
            corpus,
            import,
            out,
        } => {
            let corpus = read_corpus(&corpus, None)?;
            let mut triples = match import {
                Some(path) => {
                    let triples = import_triples(&path)?;
                    if let Some(t) = triples.iter().find(|t| corpus.get(&t.doc_id).is_none()) {
                        bail!(
                            "{}: triple refers to unknown document {:?}",
                            path.display(),
                            t.doc_id
                        );
                    }
                    triples
                }
                None => config
                    .extractor()?
                    .extract_corpus(&corpus)
                    .into_iter()
                    .flat_map(|d| d.triples)
                    .collect(),
            };
            sort_by_key(&mut triples);
            eprintln!("{} triples from {} documents", triples.len(), corpus.len());
            fs::write(&out, to_jsonl(&triples))
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Prune {
            input,
            out,
            report,
            disable,
        } => {
            let mut rules = config.rules();
            for rule in disable {
                rules.set(rule, false);
            }
            let triples = import_triples(&input)?;
            let (kept, summary) = prune_with(&triples, rules);
            eprintln!(
                "{} -> {} triples ({:.1}% kept, {} passes)",
                summary.input_count,
                summary.output_count,
                100.0 * summary.survivor_ratio(),
                summary.passes
            );
            fs::write(&out, to_jsonl(&kept))
                .with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = report {
                fs::write(&path, summary.to_json())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Build {
            corpus,
            triples,
            out,
        } => {
            let corpus = read_corpus(&corpus, None)?;
            let triples = import_triples(&triples)?;
            let graph = build_graph(&triples, &corpus)?;
            graphstore::save(&graph, &out)?;
            eprintln!("{} nodes, {} edges", graph.node_count(), graph.edge_count());
        }
        Command::Run { corpus, run_id } => {
            let corpus = read_corpus(&corpus, None)?;
            let extractor = config.extractor()?;
            let options = PipelineOptions {
                rules: config.rules(),
            };
            let run_id = run_id.unwrap_or_else(new_run_id);
            let output = run_pipeline(&corpus, &extractor, &options, &config.store, &run_id)?;
            println!("{}", serde_json::to_string_pretty(&output.run)?);
        }
        Command::Serve => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(config))?;
        }
        Command::Export { format, out, graph } => {
            let graph = load_graph(&config, &graph)?;
            write_output(out.as_deref(), &format.render(&graph))?;
        }
        Command::Path {
            source,
            target,
            directed,
            graph,
        } => {
            let graph = load_graph(&config, &graph)?;
            let path = shortest_path(
                &graph,
                find(&graph, &source)?,
                find(&graph, &target)?,
                directed,
            )?;
            if path.is_empty() {
                println!("no path");
                return Ok(());
            }
            let names: Vec<&str> = path
                .nodes
                .iter()
                .map(|&n| graph.nodes()[n].display_name.as_str())
                .collect();
            println!("{}", names.join(" -> "));
            for &e in &path.edges {
                let edge = &graph.edges()[e];
                println!(
                    "  {} --[{}]--> {}",
                    graph.nodes()[edge.source].display_name,
                    edge.relation_label,
                    graph.nodes()[edge.target].display_name
                );
            }
            println!("cost {}", path.total_cost);
        }
        Command::Centrality {
            top,
            directed,
            graph,
        } => {
            let graph = load_graph(&config, &graph)?;
            let table = closeness_centrality_with(&graph, directed);
            for (rank, (node, score)) in table.top(top).into_iter().enumerate() {
                println!(
                    "{:>4}  {score:.6}  {}",
                    rank + 1,
                    graph.nodes()[node].display_name
                );
            }
        }
        Command::Query { relation, graph } => {
            let graph = load_graph(&config, &graph)?;
            let sub = query_relations(&graph, &relation);
            for edge in &sub.edges {
                println!(
                    "{} --[{}]--> {}",
                    graph.nodes()[edge.source].display_name,
                    edge.relation_label,
                    graph.nodes()[edge.target].display_name
                );
            }
            eprintln!("{} edges, {} nodes", sub.edges.len(), sub.nodes.len());
        }
        Command::Generate { what } => match what {
            Generate::Stress { out, seed } => {
                let mut spec = StressSpec::default();
                if let Some(seed) = seed {
                    spec.seed = seed;
                }
                let triples = stress_triples(&spec);
                fs::write(&out, to_jsonl(&triples))
                    .with_context(|| format!("writing {}", out.display()))?;
                eprintln!("{} triples", triples.len());
            }
            Generate::Corpus {
                documents,
                seed,
                out,
            } => {
                let corpus = synthetic_corpus(documents, seed);
                corpus.write_jsonl(&out)?;
                eprintln!("{} documents", corpus.len());
            }
        },
    }
    Ok(())
}
