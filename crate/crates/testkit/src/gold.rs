//! Hand-annotated reference data and recall scoring.

use std::path::Path;

use serde::Deserialize;

use crate::prune::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct GoldTriple {
    pub doc_id: String,
    pub subject: String,
    pub relation: String,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct GoldMention {
    pub doc_id: String,
    pub surface: String,
    pub entity_class: String,
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Vec<T> {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{}: {e}: {l}", path.display())))
        .collect()
}

pub fn load_triples(path: &Path) -> Vec<GoldTriple> {
    read_jsonl(path)
}

pub fn load_mentions(path: &Path) -> Vec<GoldMention> {
    read_jsonl(path)
}

/// Matched count and the gold items that were missed.
#[derive(Debug, Clone)]
pub struct Recall<T> {
    pub matched: usize,
    pub total: usize,
    pub missed: Vec<T>,
}

impl<T> Recall<T> {
    pub fn value(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.matched as f64 / self.total as f64
        }
    }
}

/// A gold triple is recovered when some extracted triple of the same
/// document agrees on all three normalized fields.
/// `extracted` holds (doc_id, subject, relation, object).
pub fn triple_recall(
    gold: &[GoldTriple],
    extracted: &[(String, String, String, String)],
) -> Recall<GoldTriple> {
    let norm: Vec<(String, String, String, String)> = extracted
        .iter()
        .map(|(d, s, r, o)| (d.clone(), normalize(s), normalize(r), normalize(o)))
        .collect();
    let mut missed = Vec::new();
    for g in gold {
        let want = (
            g.doc_id.clone(),
            normalize(&g.subject),
            normalize(&g.relation),
            normalize(&g.object),
        );
        if !norm.contains(&want) {
            missed.push(g.clone());
        }
    }
    Recall {
        matched: gold.len() - missed.len(),
        total: gold.len(),
        missed,
    }
}

/// A gold mention is recovered when the document has a mention with the same
/// surface (ignoring case) and class. `found` holds (doc_id, surface, class).
pub fn mention_recall(
    gold: &[GoldMention],
    found: &[(String, String, String)],
) -> Recall<GoldMention> {
    let mut missed = Vec::new();
    for g in gold {
        let hit = found.iter().any(|(d, s, c)| {
            *d == g.doc_id
                && s.to_lowercase() == g.surface.to_lowercase()
                && c.eq_ignore_ascii_case(&g.entity_class)
        });
        if !hit {
            missed.push(g.clone());
        }
    }
    Recall {
        matched: gold.len() - missed.len(),
        total: gold.len(),
        missed,
    }
}
