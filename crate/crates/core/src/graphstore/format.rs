//! Line-oriented graph file.
//!
//! ```text
//! SPIDERGRAPH v1
//! ["N",node_id,canonical_name,display_name,entity_class,[locations...],mention_count]
//! ["E",edge_id,source,target,relation_label,[relation_tokens...],location|null,[[doc_id,sentence_index,triple_index],...]]
//! checksum sha256:<hex digest of every preceding byte>
//! ```
//!
//! Node records come first in node_id order, then edges in edge_id order.
//! Lines end in LF. Identical graphs serialize to identical bytes.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{ConceptGraph, Edge, Node};
use crate::error::{Error, Result};
use crate::extract::EntityClass;
use crate::triple::TripleKey;

pub const MAGIC: &str = "SPIDERGRAPH v1";
const MAGIC_PREFIX: &str = "SPIDERGRAPH ";
const CHECKSUM_PREFIX: &str = "checksum sha256:";

type NodeRecord = (
    String,
    usize,
    String,
    String,
    EntityClass,
    BTreeSet<String>,
    usize,
);
type EdgeRecord = (
    String,
    usize,
    usize,
    usize,
    String,
    Vec<String>,
    Option<String>,
    Vec<(String, usize, usize)>,
);

pub fn serialize(graph: &ConceptGraph) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    for n in graph.nodes() {
        let rec: NodeRecord = (
            "N".into(),
            n.node_id,
            n.canonical_name.clone(),
            n.display_name.clone(),
            n.entity_class,
            n.locations.clone(),
            n.mention_count,
        );
        out.push_str(&serde_json::to_string(&rec).expect("node record serializes"));
        out.push('\n');
    }
    for e in graph.edges() {
        let rec: EdgeRecord = (
            "E".into(),
            e.edge_id,
            e.source,
            e.target,
            e.relation_label.clone(),
            e.relation_tokens.clone(),
            e.location.clone(),
            e.provenance
                .iter()
                .map(|k| (k.doc_id.clone(), k.sentence_index, k.triple_index))
                .collect(),
        );
        out.push_str(&serde_json::to_string(&rec).expect("edge record serializes"));
        out.push('\n');
    }
    let digest = hex(&Sha256::digest(out.as_bytes()));
    out.push_str(CHECKSUM_PREFIX);
    out.push_str(&digest);
    out.push('\n');
    out
}

pub fn parse(text: &str) -> Result<ConceptGraph> {
    let bad = |m: String| Error::GraphFormat(m);
    let first = text.lines().next().unwrap_or("");
    if first != MAGIC {
        return Err(bad(if let Some(v) = first.strip_prefix(MAGIC_PREFIX) {
            format!("unsupported version {v:?}, expected {MAGIC:?}")
        } else {
            "missing magic header".into()
        }));
    }
    let body_end = text
        .trim_end_matches('\n')
        .rfind('\n')
        .map(|i| i + 1)
        .ok_or_else(|| bad("truncated: no checksum line".into()))?;
    let (body, trailer) = text.split_at(body_end);
    let expected = trailer
        .trim_end_matches('\n')
        .strip_prefix(CHECKSUM_PREFIX)
        .ok_or_else(|| bad("truncated: no checksum line".into()))?;
    if hex(&Sha256::digest(body.as_bytes())) != expected {
        return Err(bad("checksum mismatch".into()));
    }

    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in body.lines().enumerate().skip(1) {
        let line_no = i + 1;
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| bad(format!("line {line_no}: {e}")))?;
        match value.get(0).and_then(|v| v.as_str()) {
            Some("N") if edges.is_empty() => {
                let (
                    _,
                    node_id,
                    canonical_name,
                    display_name,
                    entity_class,
                    locations,
                    mention_count,
                ): NodeRecord = serde_json::from_value(value)
                    .map_err(|e| bad(format!("line {line_no}: {e}")))?;
                nodes.push(Node {
                    node_id,
                    canonical_name,
                    display_name,
                    entity_class,
                    locations,
                    mention_count,
                });
            }
            Some("E") => {
                let (
                    _,
                    edge_id,
                    source,
                    target,
                    relation_label,
                    relation_tokens,
                    location,
                    provenance,
                ): EdgeRecord = serde_json::from_value(value)
                    .map_err(|e| bad(format!("line {line_no}: {e}")))?;
                edges.push(Edge {
                    edge_id,
                    source,
                    target,
                    relation_label,
                    relation_tokens,
                    location,
                    provenance: provenance
                        .into_iter()
                        .map(|(doc_id, sentence_index, triple_index)| TripleKey {
                            doc_id,
                            sentence_index,
                            triple_index,
                        })
                        .collect(),
                });
            }
            Some("N") => return Err(bad(format!("line {line_no}: node record after edges"))),
            _ => return Err(bad(format!("line {line_no}: unknown record type"))),
        }
    }
    ConceptGraph::from_parts(nodes, edges)
}

/// Writes via a temporary sibling and a rename so readers never see a partial file.
pub fn save(graph: &ConceptGraph, path: &Path) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(serialize(graph).as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<ConceptGraph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
