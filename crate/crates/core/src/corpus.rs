//! Document collections: loading, validation and sentence segmentation.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default per-document size cap.
pub const DEFAULT_MAX_DOC_BYTES: usize = 1024 * 1024;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    #[serde(default)]
    pub title: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_time: Option<String>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, body: impl Into<String>) -> Self {
        let doc_id = doc_id.into();
        Document {
            title: doc_id.clone(),
            doc_id,
            body: body.into(),
            report_location: None,
            report_time: None,
        }
    }

    pub fn with_location(mut self, location: impl Into<String>) -> Self {
        self.report_location = Some(location.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlCharPolicy {
    #[default]
    Strip,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    #[default]
    PlainDir,
    Jsonl,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestOptions {
    pub max_doc_bytes: usize,
    pub control_chars: ControlCharPolicy,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            max_doc_bytes: DEFAULT_MAX_DOC_BYTES,
            control_chars: ControlCharPolicy::Strip,
        }
    }
}

/// An immutable, doc_id-ordered set of documents.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<Document>,
    source_manifest: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct CorpusRecord {
    #[serde(flatten)]
    document: Document,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<String>,
}

impl Corpus {
    /// Builds a corpus from documents paired with their origin, validating
    /// every document and sorting by doc_id.
    pub fn from_documents(
        docs: impl IntoIterator<Item = (Document, String)>,
        options: &IngestOptions,
    ) -> Result<Corpus> {
        let mut documents = Vec::new();
        let mut source_manifest = BTreeMap::new();
        for (doc, origin) in docs {
            let doc = validate_document(doc, options)?;
            if source_manifest.insert(doc.doc_id.clone(), origin).is_some() {
                return Err(Error::DuplicateDocument(doc.doc_id));
            }
            documents.push(doc);
        }
        if documents.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        Ok(Corpus {
            documents,
            source_manifest,
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents
            .binary_search_by(|d| d.doc_id.as_str().cmp(doc_id))
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn origin(&self, doc_id: &str) -> Option<&str> {
        self.source_manifest.get(doc_id).map(String::as_str)
    }

    pub fn source_manifest(&self) -> &BTreeMap<String, String> {
        &self.source_manifest
    }

    /// Union of two corpora. A doc_id present in both is an error.
    pub fn merge(&self, other: &Corpus) -> Result<Corpus> {
        let mut documents = self.documents.clone();
        let mut source_manifest = self.source_manifest.clone();
        for doc in &other.documents {
            if source_manifest.contains_key(&doc.doc_id) {
                return Err(Error::DuplicateDocument(doc.doc_id.clone()));
            }
            if let Some(origin) = other.source_manifest.get(&doc.doc_id) {
                source_manifest.insert(doc.doc_id.clone(), origin.clone());
            }
            documents.push(doc.clone());
        }
        documents.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        Ok(Corpus {
            documents,
            source_manifest,
        })
    }

    /// Canonical JSONL serialization, one document per line in doc_id order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            let record = CorpusRecord {
                document: doc.clone(),
                origin: self.source_manifest.get(&doc.doc_id).cloned(),
            };
            out.push_str(&serde_json::to_string(&record).expect("document serializes"));
            out.push('\n');
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(self.to_jsonl().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    /// Parses JSONL text; `source` names the input in error messages.
    pub fn parse_jsonl(text: &str, source: &Path, options: &IngestOptions) -> Result<Corpus> {
        let mut docs = Vec::new();
        let mut seen = HashSet::new();
        for (idx, line) in text.split('\n').enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let value: serde_json::Value = serde_json::from_str(line)
                .map_err(|e| Error::record(source, line_no, format!("malformed JSON: {e}")))?;
            match value.get("doc_id") {
                Some(serde_json::Value::String(id)) if !id.trim().is_empty() => {}
                Some(_) => {
                    return Err(Error::record(
                        source,
                        line_no,
                        "doc_id must be a non-empty string",
                    ))
                }
                None => {
                    return Err(Error::record(
                        source,
                        line_no,
                        "missing required field doc_id",
                    ))
                }
            }
            let mut record: CorpusRecord = serde_json::from_value(value)
                .map_err(|e| Error::record(source, line_no, format!("invalid record: {e}")))?;
            if record.document.title.is_empty() {
                record.document.title = record.document.doc_id.clone();
            }
            if !seen.insert(record.document.doc_id.clone()) {
                return Err(Error::record(
                    source,
                    line_no,
                    format!("duplicate doc_id {:?}", record.document.doc_id),
                ));
            }
            let doc = validate_document(record.document, options)
                .map_err(|e| Error::record(source, line_no, e.to_string()))?;
            let origin = record
                .origin
                .unwrap_or_else(|| format!("{}:{line_no}", source.display()));
            docs.push((doc, origin));
        }
        Corpus::from_documents(docs, options)
    }
}

fn validate_document(mut doc: Document, options: &IngestOptions) -> Result<Document> {
    let invalid = |doc: &Document, message: String| Error::InvalidDocument {
        doc_id: doc.doc_id.clone(),
        message,
    };
    if doc.doc_id.trim().is_empty() {
        return Err(invalid(&doc, "doc_id is empty".into()));
    }
    if doc.body.len() > options.max_doc_bytes {
        return Err(invalid(
            &doc,
            format!(
                "body is {} bytes, limit is {}",
                doc.body.len(),
                options.max_doc_bytes
            ),
        ));
    }
    let is_bad = |c: char| c.is_control() && c != '\n' && c != '\t';
    if doc.body.contains(is_bad) {
        match options.control_chars {
            ControlCharPolicy::Strip => doc.body.retain(|c| !is_bad(c)),
            ControlCharPolicy::Reject => {
                return Err(invalid(&doc, "body contains control characters".into()))
            }
        }
    }
    if let Some(time) = &doc.report_time {
        if !is_iso8601(time) {
            return Err(invalid(
                &doc,
                format!("report_time {time:?} is not ISO-8601"),
            ));
        }
    }
    Ok(doc)
}

fn is_iso8601(s: &str) -> bool {
    use chrono::{DateTime, NaiveDate, NaiveDateTime};
    DateTime::parse_from_rfc3339(s).is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").is_ok()
        || NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M").is_ok()
        || NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

/// Loads a corpus from a directory of `*.txt` files or a JSONL file.
pub fn ingest_path(path: &Path, format: CorpusFormat, options: &IngestOptions) -> Result<Corpus> {
    match format {
        CorpusFormat::PlainDir => ingest_dir(path, options),
        CorpusFormat::Jsonl => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            Corpus::parse_jsonl(&text, path, options)
        }
    }
}

fn ingest_dir(root: &Path, options: &IngestOptions) -> Result<Corpus> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a readable directory"),
        ));
    }
    let mut docs = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|ext| ext != "txt") {
            continue;
        }
        let rel = path
            .strip_prefix(root)
            .expect("walkdir yields children of root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let body = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut doc = Document::new(rel.clone(), body);
        doc.title = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| rel.clone());
        docs.push((doc, rel));
    }
    Corpus::from_documents(docs, options)
}

/// Rule-based sentence segmentation with an abbreviation exception list.
#[derive(Debug, Clone)]
pub struct SentenceSplitter {
    abbreviations: HashSet<String>,
}

impl Default for SentenceSplitter {
    fn default() -> Self {
        SentenceSplitter::from_list(include_str!("../data/lexicon/abbreviations.txt"))
    }
}

impl SentenceSplitter {
    /// Parses an abbreviation list: one entry per line, `#` comments, with or
    /// without the trailing period.
    pub fn from_list(text: &str) -> Self {
        let abbreviations = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.trim_end_matches('.').to_lowercase())
            .collect();
        SentenceSplitter { abbreviations }
    }

    /// Byte ranges of the sentences in `body`, trimmed of surrounding whitespace.
    pub fn split(&self, body: &str) -> Vec<Range<usize>> {
        let mut spans = Vec::new();
        let mut start: Option<usize> = None;
        let chars: Vec<(usize, char)> = body.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            if start.is_none() && !c.is_whitespace() {
                start = Some(pos);
            }
            if matches!(c, '.' | '!' | '?') {
                // Absorb runs of terminators and closing quotes/brackets.
                let mut j = i + 1;
                while j < chars.len()
                    && matches!(
                        chars[j].1,
                        '.' | '!' | '?' | '"' | '\'' | ')' | ']' | '\u{201d}' | '\u{2019}'
                    )
                {
                    j += 1;
                }
                let mut k = j;
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                let has_gap = k > j;
                let next_opens = k < chars.len() && starts_sentence(&chars[k..]);
                if has_gap && next_opens && !(c == '.' && self.is_abbreviation(body, pos)) {
                    let end = if j < chars.len() {
                        chars[j].0
                    } else {
                        body.len()
                    };
                    if let Some(s) = start.take() {
                        spans.push(s..end);
                    }
                    i = k;
                    continue;
                }
                i = j;
                continue;
            }
            i += 1;
        }
        if let Some(s) = start {
            let end = s + body[s..].trim_end().len();
            if end > s {
                spans.push(s..end);
            }
        }
        spans
    }

    fn is_abbreviation(&self, body: &str, dot: usize) -> bool {
        let before = &body[..dot];
        let word_start = before
            .rfind(|c: char| c.is_whitespace() || c == '(' || c == '"')
            .map_or(0, |i| {
                i + before[i..].chars().next().map_or(1, char::len_utf8)
            });
        let word = &before[word_start..];
        if word.is_empty() {
            return false;
        }
        // Initials ("J.") and dotted acronyms ("U.S.") never end a sentence.
        if word.chars().count() == 1 && word.chars().all(char::is_uppercase) {
            return true;
        }
        if word.contains('.') && word.split('.').all(|p| p.chars().count() <= 1) {
            return true;
        }
        self.abbreviations.contains(&word.to_lowercase())
    }
}

fn starts_sentence(rest: &[(usize, char)]) -> bool {
    rest.iter()
        .map(|&(_, c)| c)
        .find(|c| !matches!(c, '"' | '\'' | '(' | '[' | '\u{201c}' | '\u{2018}'))
        .is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

/// Sentence spans of a document using the built-in abbreviation list.
pub fn split_sentences(doc: &Document) -> Vec<Range<usize>> {
    SentenceSplitter::default().split(&doc.body)
}
