//! Relation triples and the line-delimited JSON interchange format.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::EntityClass;
use crate::text::normalize_field;

/// Provenance key: document, sentence and extraction index. Orders and
/// identifies every triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleKey {
    pub doc_id: String,
    pub sentence_index: usize,
    pub triple_index: usize,
}

impl fmt::Display for TripleKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}#{}.{}",
            self.doc_id, self.sentence_index, self.triple_index
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub doc_id: String,
    pub sentence_index: usize,
    pub triple_index: usize,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub subject_class: EntityClass,
    #[serde(default)]
    pub object_class: EntityClass,
}

fn default_confidence() -> f64 {
    1.0
}

impl Triple {
    pub fn new(
        subject: impl Into<String>,
        relation: impl Into<String>,
        object: impl Into<String>,
        doc_id: impl Into<String>,
        sentence_index: usize,
        triple_index: usize,
    ) -> Self {
        Triple {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
            doc_id: doc_id.into(),
            sentence_index,
            triple_index,
            confidence: 1.0,
            subject_class: EntityClass::Unknown,
            object_class: EntityClass::Unknown,
        }
    }

    pub fn key(&self) -> TripleKey {
        TripleKey {
            doc_id: self.doc_id.clone(),
            sentence_index: self.sentence_index,
            triple_index: self.triple_index,
        }
    }

    pub fn key_ref(&self) -> (&str, usize, usize) {
        (&self.doc_id, self.sentence_index, self.triple_index)
    }

    /// Checks the field invariants; returns a description of the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (name, value) in [
            ("subject", &self.subject),
            ("relation", &self.relation),
            ("object", &self.object),
        ] {
            if normalize_field(value).is_empty() {
                return Err(format!("{name} is empty after normalization"));
            }
        }
        if self.doc_id.trim().is_empty() {
            return Err("doc_id is empty".into());
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(format!("confidence {} outside [0, 1]", self.confidence));
        }
        Ok(())
    }
}

/// Sorts triples into provenance-key order.
pub fn sort_by_key(triples: &mut [Triple]) {
    triples.sort_by(|a, b| a.key_ref().cmp(&b.key_ref()));
}

/// Serializes triples as JSONL in the order given.
pub fn to_jsonl(triples: &[Triple]) -> String {
    let mut out = String::new();
    for t in triples {
        out.push_str(&serde_json::to_string(t).expect("triple serializes"));
        out.push('\n');
    }
    out
}

pub fn write_triples(path: &Path, triples: &[Triple]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(to_jsonl(triples).as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Parses interchange JSONL, validating every record and rejecting duplicate
/// provenance keys. `source` names the input in errors.
pub fn parse_triples(text: &str, source: &Path) -> Result<Vec<Triple>> {
    let mut triples = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let triple: Triple = serde_json::from_str(line)
            .map_err(|e| Error::record(source, line_no, format!("invalid triple record: {e}")))?;
        triple
            .validate()
            .map_err(|m| Error::record(source, line_no, m))?;
        if !seen.insert(triple.key()) {
            return Err(Error::record(
                source,
                line_no,
                format!("duplicate ordering key {}", triple.key()),
            ));
        }
        triples.push(triple);
    }
    Ok(triples)
}

/// Reads an externally produced triple file.
pub fn import_triples(path: &Path) -> Result<Vec<Triple>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_triples(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const VALID: &str = r#"{"subject":"the men","relation":"spoke to","object":"their leader","doc_id":"d1","sentence_index":0,"triple_index":0}
{"subject":"John","relation":"traveled to","object":"Baghdad","doc_id":"d1","sentence_index":1,"triple_index":0,"confidence":0.5,"subject_class":"PERSON","object_class":"LOCATION"}
{"subject":"John","relation":"traveled to Baghdad in","object":"January","doc_id":"d1","sentence_index":1,"triple_index":1}
"#;

    #[test]
    fn parses_valid_records() {
        let triples = parse_triples(VALID, Path::new("t.jsonl")).unwrap();
        assert_eq!(triples.len(), 3);
        assert_eq!(triples[0].confidence, 1.0);
        assert_eq!(triples[1].confidence, 0.5);
        assert_eq!(triples[1].subject_class, EntityClass::Person);
        assert_eq!(triples[2].object_class, EntityClass::Unknown);
    }

    #[test]
    fn empty_relation_is_rejected_at_its_line() {
        let text = format!(
            "{VALID}{}\n",
            r#"{"subject":"x","relation":"  the ","object":"b","doc_id":"d1","sentence_index":5,"triple_index":0}"#
        );
        match parse_triples(&text, Path::new("t.jsonl")) {
            Err(Error::Record { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("relation"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let text = format!(
            "{VALID}{}\n",
            r#"{"subject":"a","relation":"r","object":"b","doc_id":"d1","sentence_index":1,"triple_index":1}"#
        );
        assert!(matches!(
            parse_triples(&text, Path::new("t")),
            Err(Error::Record { line: 4, .. })
        ));
    }

    #[test]
    fn missing_provenance_is_rejected() {
        let text = r#"{"subject":"a","relation":"r","object":"b","doc_id":"d1"}"#;
        assert!(matches!(
            parse_triples(text, Path::new("t")),
            Err(Error::Record { line: 1, .. })
        ));
    }

    #[test]
    fn confidence_out_of_range_is_rejected() {
        let text = r#"{"subject":"a","relation":"r","object":"b","doc_id":"d1","sentence_index":0,"triple_index":0,"confidence":1.5}"#;
        assert!(parse_triples(text, Path::new("t")).is_err());
    }

    #[test]
    fn jsonl_roundtrip() {
        let triples = parse_triples(VALID, Path::new("t")).unwrap();
        let again = parse_triples(&to_jsonl(&triples), Path::new("t")).unwrap();
        assert_eq!(again, triples);
    }
}
