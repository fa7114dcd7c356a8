//! Property graph built from triples: one node per canonical entity name,
//! one edge per distinct (source, target, relation).

mod export;
mod format;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::extract::EntityClass;
use crate::text::{normalize_field, stem_tokens};
use crate::triple::{Triple, TripleKey};

pub use export::{to_graphml, to_json, ExportFormat};
pub use format::{load, parse, save, serialize, MAGIC};

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub node_id: NodeId,
    pub canonical_name: String,
    pub display_name: String,
    pub entity_class: EntityClass,
    pub locations: BTreeSet<String>,
    pub mention_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub edge_id: EdgeId,
    pub source: NodeId,
    pub target: NodeId,
    pub relation_label: String,
    pub relation_tokens: Vec<String>,
    pub location: Option<String>,
    pub provenance: Vec<TripleKey>,
}

impl Edge {
    /// The endpoint across from `node`, or `None` if `node` is not on the edge.
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if self.source == node {
            Some(self.target)
        } else if self.target == node {
            Some(self.source)
        } else {
            None
        }
    }
}

/// Nodes and edges with a name index and adjacency in both directions.
#[derive(Debug, Clone, Default)]
pub struct ConceptGraph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<String, NodeId>,
    outgoing: Vec<Vec<EdgeId>>,
    incoming: Vec<Vec<EdgeId>>,
}

impl PartialEq for ConceptGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Eq for ConceptGraph {}

/// A node/edge selection that keeps the ids of the graph it came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }
}

impl ConceptGraph {
    /// Assembles a graph, checking id density, endpoint references, name
    /// uniqueness and non-empty provenance.
    pub fn from_parts(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if n.node_id != i {
                return Err(Error::GraphFormat(format!(
                    "node id {} at position {i}",
                    n.node_id
                )));
            }
            if n.mention_count == 0 {
                return Err(Error::GraphFormat(format!("node {i} has no mentions")));
            }
            if index.insert(n.canonical_name.clone(), i).is_some() {
                return Err(Error::GraphFormat(format!(
                    "duplicate canonical name {:?}",
                    n.canonical_name
                )));
            }
        }
        let mut outgoing = vec![Vec::new(); nodes.len()];
        let mut incoming = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            if e.edge_id != i {
                return Err(Error::GraphFormat(format!(
                    "edge id {} at position {i}",
                    e.edge_id
                )));
            }
            if e.source >= nodes.len() || e.target >= nodes.len() {
                return Err(Error::GraphFormat(format!(
                    "edge {i} references a missing node"
                )));
            }
            if e.provenance.is_empty() {
                return Err(Error::GraphFormat(format!("edge {i} has no provenance")));
            }
            outgoing[e.source].push(i);
            incoming[e.target].push(i);
        }
        Ok(ConceptGraph {
            nodes,
            edges,
            index,
            outgoing,
            incoming,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node id for an exact canonical name.
    pub fn node_id(&self, canonical_name: &str) -> Option<NodeId> {
        self.index.get(canonical_name).copied()
    }

    /// Resolves a user-supplied name by normalizing it first.
    pub fn find_node(&self, name: &str) -> Option<NodeId> {
        self.node_id(&normalize_field(name))
    }

    pub fn outgoing(&self, id: NodeId) -> &[EdgeId] {
        &self.outgoing[id]
    }

    pub fn incoming(&self, id: NodeId) -> &[EdgeId] {
        &self.incoming[id]
    }

    pub(crate) fn check_node(&self, id: NodeId) -> Result<()> {
        if id < self.nodes.len() {
            Ok(())
        } else {
            Err(Error::UnknownNode(id.to_string()))
        }
    }

    /// Induced subgraph of every node within `radius` undirected hops of `center`.
    pub fn neighborhood(&self, center: NodeId, radius: usize) -> Result<Subgraph> {
        self.check_node(center)?;
        let mut dist: Vec<Option<usize>> = vec![None; self.nodes.len()];
        dist[center] = Some(0);
        let mut queue = VecDeque::from([center]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued nodes have a distance");
            if d == radius {
                continue;
            }
            for &e in self.outgoing[v].iter().chain(&self.incoming[v]) {
                let w = self.edges[e].other(v).expect("adjacent edge");
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        let inside: Vec<bool> = dist.iter().map(Option::is_some).collect();
        Ok(self.induced(&inside))
    }

    fn induced(&self, inside: &[bool]) -> Subgraph {
        Subgraph {
            nodes: self
                .nodes
                .iter()
                .filter(|n| inside[n.node_id])
                .cloned()
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| inside[e.source] && inside[e.target])
                .cloned()
                .collect(),
        }
    }

    /// Edges selected by id plus their endpoints, ids preserved.
    pub fn edge_subgraph(&self, edge_ids: &[EdgeId]) -> Subgraph {
        let mut ids: Vec<EdgeId> = edge_ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let endpoints: BTreeSet<NodeId> = ids
            .iter()
            .flat_map(|&e| [self.edges[e].source, self.edges[e].target])
            .collect();
        Subgraph {
            nodes: endpoints.iter().map(|&n| self.nodes[n].clone()).collect(),
            edges: ids.iter().map(|&e| self.edges[e].clone()).collect(),
        }
    }

    /// A window of nodes in id order plus the edges among them.
    pub fn page(&self, offset: usize, limit: usize) -> Subgraph {
        let end = offset.saturating_add(limit).min(self.nodes.len());
        let start = offset.min(end);
        let inside: Vec<bool> = (0..self.nodes.len())
            .map(|i| i >= start && i < end)
            .collect();
        self.induced(&inside)
    }

    pub fn as_subgraph(&self) -> Subgraph {
        Subgraph {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
        }
    }
}

#[derive(Default)]
struct NodeAcc {
    display: String,
    class_votes: [usize; 4],
    locations: BTreeSet<String>,
    location_refs: BTreeSet<String>,
    mentions: usize,
}

impl NodeAcc {
    fn add_surface(&mut self, surface: &str) {
        let surface = surface.split_whitespace().collect::<Vec<_>>().join(" ");
        let longer = surface.chars().count().cmp(&self.display.chars().count());
        if self.mentions == 0 || longer.is_gt() || (longer.is_eq() && surface < self.display) {
            self.display = surface;
        }
        self.mentions += 1;
    }

    fn class(&self) -> EntityClass {
        // Known classes in declaration order; UNKNOWN only when nothing else was seen.
        let known = [
            EntityClass::Person,
            EntityClass::Organization,
            EntityClass::Location,
        ];
        let mut best = EntityClass::Unknown;
        let mut best_votes = 0;
        for (i, class) in known.into_iter().enumerate() {
            if self.class_votes[i] > best_votes {
                best = class;
                best_votes = self.class_votes[i];
            }
        }
        if best_votes > 0 && best_votes >= self.class_votes[3] {
            best
        } else {
            EntityClass::Unknown
        }
    }
}

fn class_slot(c: EntityClass) -> usize {
    match c {
        EntityClass::Person => 0,
        EntityClass::Organization => 1,
        EntityClass::Location => 2,
        EntityClass::Unknown => 3,
    }
}

/// Builds the graph. Triples whose fields normalize to nothing are skipped;
/// a triple naming a document absent from `corpus` is an error.
pub fn build_graph(triples: &[Triple], corpus: &Corpus) -> Result<ConceptGraph> {
    let mut ordered: Vec<&Triple> = triples.iter().collect();
    ordered.sort_by(|a, b| a.key_ref().cmp(&b.key_ref()));

    let mut acc: BTreeMap<String, NodeAcc> = BTreeMap::new();
    let mut edge_acc: BTreeMap<(String, String, String), Vec<TripleKey>> = BTreeMap::new();
    for t in ordered {
        let doc = corpus
            .get(&t.doc_id)
            .ok_or_else(|| Error::UnknownDocument {
                key: t.key().to_string(),
                doc_id: t.doc_id.clone(),
            })?;
        let (s, r, o) = (
            normalize_field(&t.subject),
            normalize_field(&t.relation),
            normalize_field(&t.object),
        );
        if s.is_empty() || r.is_empty() || o.is_empty() {
            log::warn!("skipping triple {} with an empty field", t.key());
            continue;
        }
        for (canon, surface, class) in [
            (&s, &t.subject, t.subject_class),
            (&o, &t.object, t.object_class),
        ] {
            let node = acc.entry(canon.clone()).or_default();
            node.add_surface(surface);
            node.class_votes[class_slot(class)] += 1;
            if let Some(loc) = &doc.report_location {
                node.locations.insert(loc.clone());
            }
        }
        if t.object_class == EntityClass::Location && s != o {
            acc.get_mut(&s)
                .expect("subject node")
                .location_refs
                .insert(o.clone());
        }
        edge_acc.entry((s, o, r)).or_default().push(t.key());
    }

    let displays: HashMap<String, String> = acc
        .iter()
        .map(|(k, v)| (k.clone(), v.display.clone()))
        .collect();
    let mut ids: HashMap<&str, NodeId> = HashMap::with_capacity(acc.len());
    let mut nodes = Vec::with_capacity(acc.len());
    for (i, (canon, a)) in acc.iter().enumerate() {
        ids.insert(canon, i);
        let mut locations = a.locations.clone();
        locations.extend(a.location_refs.iter().map(|c| displays[c].clone()));
        nodes.push(Node {
            node_id: i,
            canonical_name: canon.clone(),
            display_name: a.display.clone(),
            entity_class: a.class(),
            locations,
            mention_count: a.mentions,
        });
    }

    let mut edges = Vec::with_capacity(edge_acc.len());
    for (i, ((s, o, r), provenance)) in edge_acc.into_iter().enumerate() {
        let (source, target) = (ids[s.as_str()], ids[o.as_str()]);
        let location = edge_location(&nodes[source], &nodes[target], &provenance, corpus);
        edges.push(Edge {
            edge_id: i,
            source,
            target,
            relation_tokens: stem_tokens(&r),
            relation_label: r,
            location,
            provenance,
        });
    }
    ConceptGraph::from_parts(nodes, edges)
}

/// The single location both endpoints share, else the first provenance
/// document's report location.
fn edge_location(
    source: &Node,
    target: &Node,
    provenance: &[TripleKey],
    corpus: &Corpus,
) -> Option<String> {
    let mut common = source.locations.intersection(&target.locations);
    if let (Some(only), None) = (common.next(), common.next()) {
        return Some(only.clone());
    }
    provenance.iter().find_map(|k| {
        corpus
            .get(&k.doc_id)
            .and_then(|d| d.report_location.clone())
    })
}
