//! Read-only graph algorithms: shortest path, closeness centrality and
//! relation-type filtering.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graphstore::{ConceptGraph, Edge, EdgeId, NodeId, Subgraph};
use crate::text::{normalize_field, stem_tokens};

/// Edge weight used by path search. Every edge costs 1 today.
pub fn edge_weight(_edge: &Edge) -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub total_cost: f64,
}

impl PathResult {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Steps available from `v`: (neighbor, edge) pairs. Self-loops never help a path.
fn steps(graph: &ConceptGraph, v: NodeId, directed: bool, reverse: bool) -> Vec<(NodeId, EdgeId)> {
    let mut out = Vec::new();
    let forward = !directed || !reverse;
    let backward = !directed || reverse;
    if forward {
        for &e in graph.outgoing(v) {
            out.push((graph.edges()[e].target, e));
        }
    }
    if backward {
        for &e in graph.incoming(v) {
            out.push((graph.edges()[e].source, e));
        }
    }
    out.retain(|&(w, _)| w != v);
    out
}

#[derive(PartialEq)]
struct Entry(f64, NodeId);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra distances from `origin`; with `reverse`, distances *to* `origin`.
fn dijkstra(graph: &ConceptGraph, origin: NodeId, directed: bool, reverse: bool) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    dist[origin] = 0.0;
    let mut heap = BinaryHeap::from([Entry(0.0, origin)]);
    while let Some(Entry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for (w, e) in steps(graph, v, directed, reverse) {
            let nd = d + edge_weight(&graph.edges()[e]);
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry(nd, w));
            }
        }
    }
    dist
}

/// Minimum-cost path; among equal-cost paths the lexicographically smallest
/// node sequence, and between parallel edges the smallest edge id. An
/// unreachable target gives an empty result.
pub fn shortest_path(
    graph: &ConceptGraph,
    source: NodeId,
    target: NodeId,
    directed: bool,
) -> Result<PathResult> {
    graph.check_node(source)?;
    graph.check_node(target)?;
    let to_target = dijkstra(graph, target, directed, true);
    if to_target[source].is_infinite() {
        return Ok(PathResult::default());
    }
    let mut nodes = vec![source];
    let mut edges = Vec::new();
    let mut v = source;
    while v != target {
        let (w, e) = steps(graph, v, directed, false)
            .into_iter()
            .filter(|&(w, e)| edge_weight(&graph.edges()[e]) + to_target[w] == to_target[v])
            .min()
            .expect("a tight edge leaves every node on a shortest path");
        nodes.push(w);
        edges.push(e);
        v = w;
    }
    let total_cost = edges.iter().map(|&e| edge_weight(&graph.edges()[e])).sum();
    Ok(PathResult {
        nodes,
        edges,
        total_cost,
    })
}

/// Closeness score per node, indexed by node id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CentralityTable {
    pub scores: Vec<f64>,
}

impl CentralityTable {
    pub fn score(&self, node: NodeId) -> Option<f64> {
        self.scores.get(node).copied()
    }

    /// Node ids by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = (0..self.scores.len()).collect();
        ids.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        ids
    }

    pub fn top(&self, k: usize) -> Vec<(NodeId, f64)> {
        self.ranking()
            .into_iter()
            .take(k)
            .map(|id| (id, self.scores[id]))
            .collect()
    }
}

/// Undirected closeness with component normalization:
/// `(r / (n - 1)) * (r / S)` for `r` reachable nodes at total distance `S`.
pub fn closeness_centrality(graph: &ConceptGraph) -> CentralityTable {
    closeness_centrality_with(graph, false)
}

/// As [`closeness_centrality`]; `directed` follows outgoing edges only.
pub fn closeness_centrality_with(graph: &ConceptGraph, directed: bool) -> CentralityTable {
    let n = graph.node_count();
    let adjacency: Vec<Vec<NodeId>> = (0..n)
        .map(|v| {
            let mut ws: Vec<NodeId> = steps(graph, v, directed, false)
                .into_iter()
                .map(|(w, _)| w)
                .collect();
            ws.sort_unstable();
            ws.dedup();
            ws
        })
        .collect();
    let scores = (0..n)
        .into_par_iter()
        .map(|v| {
            let (r, s) = bfs_reach(&adjacency, v);
            if r == 0 {
                0.0
            } else {
                let r = r as f64;
                (r / (n - 1) as f64) * (r / s as f64)
            }
        })
        .collect();
    CentralityTable { scores }
}

/// Count of nodes reachable from `v` (excluding it) and their distance sum.
fn bfs_reach(adjacency: &[Vec<NodeId>], v: NodeId) -> (usize, usize) {
    let mut dist = vec![usize::MAX; adjacency.len()];
    dist[v] = 0;
    let mut queue = VecDeque::from([v]);
    let (mut reached, mut total) = (0, 0);
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                reached += 1;
                total += dist[w];
                queue.push_back(w);
            }
        }
    }
    (reached, total)
}

/// Edges whose stemmed relation tokens include every stemmed query token,
/// with their endpoints. A query with no tokens matches nothing.
pub fn query_relations(graph: &ConceptGraph, query: &str) -> Subgraph {
    let wanted = stem_tokens(&normalize_field(query));
    if wanted.is_empty() {
        return Subgraph::default();
    }
    let hits: Vec<EdgeId> = graph
        .edges()
        .iter()
        .filter(|e| wanted.iter().all(|w| e.relation_tokens.contains(w)))
        .map(|e| e.edge_id)
        .collect();
    graph.edge_subgraph(&hits)
}
