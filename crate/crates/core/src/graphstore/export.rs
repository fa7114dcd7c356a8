use std::fmt::Write;
use std::str::FromStr;

use super::ConceptGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    GraphMl,
}

impl FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "graphml" => Ok(ExportFormat::GraphMl),
            other => Err(format!("unknown export format {other:?} (json, graphml)")),
        }
    }
}

impl ExportFormat {
    pub fn render(self, graph: &ConceptGraph) -> String {
        match self {
            ExportFormat::Json => to_json(graph),
            ExportFormat::GraphMl => to_graphml(graph),
        }
    }
}

/// `{"nodes": [...], "edges": [...]}` with every node and edge property.
pub fn to_json(graph: &ConceptGraph) -> String {
    serde_json::to_string_pretty(&graph.as_subgraph()).expect("graph serializes")
}

pub fn to_graphml(graph: &ConceptGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, domain, name) in [
        ("d0", "node", "canonical_name"),
        ("d1", "node", "display_name"),
        ("d2", "node", "entity_class"),
        ("d3", "node", "locations"),
        ("d4", "node", "mention_count"),
        ("d5", "edge", "relation_label"),
        ("d6", "edge", "location"),
        ("d7", "edge", "provenance"),
    ] {
        let ty = if name == "mention_count" {
            "int"
        } else {
            "string"
        };
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{domain}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
        );
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    for n in graph.nodes() {
        let locations = n.locations.iter().cloned().collect::<Vec<_>>().join("; ");
        let _ = writeln!(out, "    <node id=\"n{}\">", n.node_id);
        data(&mut out, "d0", &n.canonical_name);
        data(&mut out, "d1", &n.display_name);
        data(&mut out, "d2", n.entity_class.as_str());
        data(&mut out, "d3", &locations);
        data(&mut out, "d4", &n.mention_count.to_string());
        out.push_str("    </node>\n");
    }
    for e in graph.edges() {
        let provenance = e
            .provenance
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            out,
            "    <edge id=\"e{}\" source=\"n{}\" target=\"n{}\">",
            e.edge_id, e.source, e.target
        );
        data(&mut out, "d5", &e.relation_label);
        if let Some(loc) = &e.location {
            data(&mut out, "d6", loc);
        }
        data(&mut out, "d7", &provenance);
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn data(out: &mut String, key: &str, value: &str) {
    let _ = writeln!(out, "      <data key=\"{key}\">{}</data>", escape(value));
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, Document};
    use crate::graphstore::build_graph;
    use crate::triple::Triple;

    fn graph() -> ConceptGraph {
        let corpus = Corpus::from_documents(
            vec![(Document::new("d", "x"), "t".to_string())],
            &Default::default(),
        )
        .unwrap();
        build_graph(
            &[Triple::new("AT&T", "bought", "<Widgets>", "d", 0, 0)],
            &corpus,
        )
        .unwrap()
    }

    #[test]
    fn json_export_lists_nodes_and_edges() {
        let v: serde_json::Value = serde_json::from_str(&to_json(&graph())).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 2);
        assert_eq!(v["edges"][0]["relation_label"], "bought");
    }

    #[test]
    fn graphml_escapes_markup() {
        let xml = to_graphml(&graph());
        assert!(xml.contains("AT&amp;T"));
        assert!(xml.contains("&lt;Widgets&gt;"));
        assert_eq!(xml.matches("<node ").count(), 2);
        assert_eq!(xml.matches("<edge ").count(), 1);
    }

    #[test]
    fn format_names_parse() {
        assert_eq!(
            "GraphML".parse::<ExportFormat>().unwrap(),
            ExportFormat::GraphMl
        );
        assert!("csv".parse::<ExportFormat>().is_err());
    }
}
