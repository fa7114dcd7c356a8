//! Rule-based extraction: entity mentions, pronoun resolution and
//! (subject, relation, object) triples per sentence.

mod coref;
pub mod lexicon;
mod ner;
pub mod tagger;

use std::ops::Range;

use rayon::prelude::*;

pub use coref::{resolve_coreferences, ResolutionMap, DEFAULT_WINDOW};
pub use lexicon::{Gender, Lexicon, Number};
pub use ner::{classify_name, recognize_entities, EntityClass, Mention};

use crate::corpus::{Corpus, Document, SentenceSplitter};
use crate::triple::Triple;
use ner::{analyze, SentenceAnalysis};
use tagger::{ChunkKind, Tag};

/// Everything extraction learned about one document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentExtraction {
    pub doc_id: String,
    pub sentences: usize,
    pub mentions: Vec<Vec<Mention>>,
    pub resolution: ResolutionMap,
    pub triples: Vec<Triple>,
}

impl DocumentExtraction {
    pub fn mention_count(&self) -> usize {
        self.mentions.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Extractor {
    lexicon: Lexicon,
    splitter: SentenceSplitter,
    window: usize,
}

impl Default for Extractor {
    fn default() -> Self {
        Extractor::new(Lexicon::default())
    }
}

impl Extractor {
    pub fn new(lexicon: Lexicon) -> Self {
        let splitter = SentenceSplitter::from_list(&lexicon.abbreviations);
        Extractor {
            lexicon,
            splitter,
            window: DEFAULT_WINDOW,
        }
    }

    /// Sets the coreference lookback window in sentences.
    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn splitter(&self) -> &SentenceSplitter {
        &self.splitter
    }

    pub fn sentences<'a>(&self, doc: &'a Document) -> Vec<(Range<usize>, &'a str)> {
        self.splitter
            .split(&doc.body)
            .into_iter()
            .map(|r| (r.clone(), &doc.body[r]))
            .collect()
    }

    pub fn recognize_entities(
        &self,
        doc_id: &str,
        sentence: &str,
        sentence_index: usize,
    ) -> Vec<Mention> {
        recognize_entities(&self.lexicon, doc_id, sentence, sentence_index)
    }

    fn analyses<'a>(&self, doc: &'a Document) -> Vec<SentenceAnalysis<'a>> {
        self.sentences(doc)
            .into_iter()
            .enumerate()
            .map(|(i, (_, text))| analyze(&self.lexicon, &doc.doc_id, text, i))
            .collect()
    }

    pub fn resolve_coreferences(&self, doc: &Document) -> ResolutionMap {
        let mentions: Vec<Vec<Mention>> =
            self.analyses(doc).into_iter().map(|a| a.mentions).collect();
        resolve_coreferences(&self.lexicon, &mentions, self.window)
    }

    pub fn extract_triples(&self, doc: &Document, resolution: &ResolutionMap) -> Vec<Triple> {
        let analyses = self.analyses(doc);
        self.triples_from(doc, &analyses, resolution)
    }

    fn triples_from(
        &self,
        doc: &Document,
        analyses: &[SentenceAnalysis<'_>],
        resolution: &ResolutionMap,
    ) -> Vec<Triple> {
        let mut out = Vec::new();
        for (si, an) in analyses.iter().enumerate() {
            let mut emitted = Vec::new();
            for clause in clauses(an) {
                if let Some(t) = self.realize(an, &clause, resolution) {
                    emitted.push(t);
                }
            }
            for (ti, (subject, relation, object, sc, oc)) in emitted.into_iter().enumerate() {
                let mut t = Triple::new(subject, relation, object, &doc.doc_id, si, ti);
                t.subject_class = sc;
                t.object_class = oc;
                out.push(t);
            }
        }
        out
    }

    /// Full extraction for one document.
    pub fn extract_document(&self, doc: &Document) -> DocumentExtraction {
        let analyses = self.analyses(doc);
        let mentions: Vec<Vec<Mention>> = analyses.iter().map(|a| a.mentions.clone()).collect();
        let resolution = resolve_coreferences(&self.lexicon, &mentions, self.window);
        let triples = self.triples_from(doc, &analyses, &resolution);
        DocumentExtraction {
            doc_id: doc.doc_id.clone(),
            sentences: analyses.len(),
            mentions,
            resolution,
            triples,
        }
    }

    /// Extracts every document, concurrently, returning results in corpus order.
    pub fn extract_corpus(&self, corpus: &Corpus) -> Vec<DocumentExtraction> {
        corpus
            .documents()
            .par_iter()
            .map(|d| self.extract_document(d))
            .collect()
    }

    fn realize(
        &self,
        an: &SentenceAnalysis<'_>,
        clause: &Clause,
        resolution: &ResolutionMap,
    ) -> Option<(String, String, String, EntityClass, EntityClass)> {
        let (subject, subject_class) = self.nominal_text(an, clause.subject.clone(), resolution)?;
        let (object, object_class) =
            self.nominal_text(an, clause.object..clause.object + 1, resolution)?;
        let mut relation = Vec::new();
        for part in &clause.relation {
            match part {
                RelPart::Chunk(c) => relation.push(an.chunks[*c].text(an.text).to_string()),
                RelPart::Nominal(c) => {
                    relation.push(self.nominal_text(an, *c..*c + 1, resolution)?.0)
                }
            }
        }
        Some((
            subject,
            relation.join(" "),
            object,
            subject_class,
            object_class,
        ))
    }

    /// Text and class of a nominal chunk range, substituting a resolved
    /// antecedent for a pronoun. `None` when the pronoun is unresolved.
    fn nominal_text(
        &self,
        an: &SentenceAnalysis<'_>,
        chunks: Range<usize>,
        resolution: &ResolutionMap,
    ) -> Option<(String, EntityClass)> {
        let first = &an.chunks[chunks.start];
        let mention = an.chunk_mention[chunks.start].map(|m| &an.mentions[m]);
        if first.kind == ChunkKind::Pronoun {
            let pronoun = mention?;
            let antecedent = resolution.antecedent(pronoun)?;
            return Some((
                self.lowercase_function_word(&antecedent.surface),
                antecedent.entity_class,
            ));
        }
        let last = &an.chunks[chunks.end - 1];
        let text = &an.text[first.span.start..last.span.end];
        let class = mention.map_or(EntityClass::Unknown, |m| m.entity_class);
        let lead = &an.tagged[first.tokens.start];
        let text = if matches!(lead.tag, Tag::Det | Tag::Poss) {
            format!("{}{}", lead.lower(), &text[lead.token.text.len()..])
        } else {
            text.to_string()
        };
        Some((text, class))
    }

    fn lowercase_function_word(&self, surface: &str) -> String {
        let mut words = surface.splitn(2, ' ');
        let first = words.next().unwrap_or_default();
        let lower = first.to_lowercase();
        if self.lexicon.determiners.contains(&lower) || self.lexicon.possessives.contains(&lower) {
            match words.next() {
                Some(rest) => format!("{lower} {rest}"),
                None => lower,
            }
        } else {
            surface.to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum RelPart {
    Chunk(usize),
    Nominal(usize),
}

/// One clause match: subject chunk range, relation pieces, object chunk.
#[derive(Debug, Clone)]
struct Clause {
    subject: Range<usize>,
    relation: Vec<RelPart>,
    object: usize,
}

fn clauses(an: &SentenceAnalysis<'_>) -> Vec<Clause> {
    let ch = &an.chunks;
    let kind = |i: usize| ch.get(i).map(|c| c.kind);
    let skip_adv = |mut i: usize| {
        while kind(i) == Some(ChunkKind::Adv) {
            i += 1;
        }
        i
    };
    let mut out = Vec::new();
    for (i, chunk) in ch.iter().enumerate() {
        if !chunk.is_nominal() {
            continue;
        }
        let j = skip_adv(i + 1);
        if kind(j) == Some(ChunkKind::VerbGroup) {
            let subject = subject_range(an, i);
            predicate(an, subject, j, &mut out);
            continue;
        }
        // Relative clause: "X, who VG ..., VG ...".
        let mut r = i + 1;
        if kind(r) == Some(ChunkKind::Comma) {
            r += 1;
        }
        if kind(r) == Some(ChunkKind::Rel) {
            let v = skip_adv(r + 1);
            if kind(v) == Some(ChunkKind::VerbGroup) {
                let end = predicate(an, i..i + 1, v, &mut out);
                if kind(end) == Some(ChunkKind::Comma) {
                    let main = skip_adv(end + 1);
                    if kind(main) == Some(ChunkKind::VerbGroup) {
                        predicate(an, i..i + 1, main, &mut out);
                    }
                }
            }
        }
    }
    out
}

/// Subject chunks ending at `np`. A sentence-initial "NP prep NP" before the
/// verb is one subject ("Doctors at the hospital treated ...").
fn subject_range(an: &SentenceAnalysis<'_>, np: usize) -> Range<usize> {
    let ch = &an.chunks;
    if np == 2
        && ch[1].kind == ChunkKind::Prep
        && ch[0].kind == ChunkKind::NounPhrase
        && ch[np].kind == ChunkKind::NounPhrase
    {
        return 0..np + 1;
    }
    np..np + 1
}

/// Parses "VG [prep] NP (prep NP)*" at `vg`, pushing the base clause and one
/// nested clause per trailing prepositional attachment, then follows "and VG"
/// coordination with the same subject. Returns the index after the predicate.
fn predicate(
    an: &SentenceAnalysis<'_>,
    subject: Range<usize>,
    vg: usize,
    out: &mut Vec<Clause>,
) -> usize {
    let ch = &an.chunks;
    let kind = |i: usize| ch.get(i).map(|c| c.kind);
    let mut k = vg + 1;
    while kind(k) == Some(ChunkKind::Adv) {
        k += 1;
    }
    let mut relation = vec![RelPart::Chunk(vg)];
    if kind(k) == Some(ChunkKind::Prep) && ch.get(k + 1).is_some_and(|c| c.is_nominal()) {
        relation.push(RelPart::Chunk(k));
        k += 1;
    }
    if ch.get(k).is_some_and(|c| c.is_nominal()) {
        out.push(Clause {
            subject: subject.clone(),
            relation: relation.clone(),
            object: k,
        });
        let mut last_object = k;
        k += 1;
        while kind(k) == Some(ChunkKind::Prep) && ch.get(k + 1).is_some_and(|c| c.is_nominal()) {
            relation.push(RelPart::Nominal(last_object));
            relation.push(RelPart::Chunk(k));
            out.push(Clause {
                subject: subject.clone(),
                relation: relation.clone(),
                object: k + 1,
            });
            last_object = k + 1;
            k += 2;
        }
    }
    if kind(k) == Some(ChunkKind::Conj)
        && an.chunks[k].text(an.text).eq_ignore_ascii_case("and")
        && kind(k + 1) == Some(ChunkKind::VerbGroup)
    {
        return predicate(an, subject, k + 1, out);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triples(body: &str) -> Vec<(String, String, String)> {
        let ex = Extractor::default();
        let doc = Document::new("d", body);
        ex.extract_document(&doc)
            .triples
            .into_iter()
            .map(|t| (t.subject, t.relation, t.object))
            .collect()
    }

    fn t(s: &str, r: &str, o: &str) -> (String, String, String) {
        (s.into(), r.into(), o.into())
    }

    #[test]
    fn men_spoke_to_their_leader() {
        assert_eq!(
            triples("The men spoke to their leader"),
            [t("the men", "spoke to", "their leader")]
        );
    }

    #[test]
    fn no_verb_group_no_triples() {
        assert!(triples("The old bunker near the river.").is_empty());
    }

    #[test]
    fn nested_prepositional_variant() {
        assert_eq!(
            triples("John traveled to eastern Baghdad in January"),
            [
                t("John", "traveled to", "eastern Baghdad"),
                t("John", "traveled to eastern Baghdad in", "January")
            ]
        );
    }

    #[test]
    fn pronouns_are_replaced_or_dropped() {
        let got =
            triples("The group of soldiers left the bunker yesterday. They returned to the base.");
        assert_eq!(
            got,
            [
                t("the group of soldiers", "left", "the bunker"),
                t("the group of soldiers", "returned to", "the base")
            ]
        );
        assert!(triples("They returned to the base.").is_empty());
    }

    #[test]
    fn coordination_and_relative_clauses_share_subject() {
        let got = triples("Omar Farouk met Ali and paid the driver.");
        assert_eq!(
            got,
            [
                t("Omar Farouk", "met", "Ali"),
                t("Omar Farouk", "paid", "the driver")
            ]
        );
        let got = triples("Salim Haddad, who leads the network, threatened the families.");
        assert_eq!(
            got,
            [
                t("Salim Haddad", "leads", "the network"),
                t("Salim Haddad", "threatened", "the families")
            ]
        );
    }

    #[test]
    fn prepositional_subject_at_sentence_start() {
        assert_eq!(
            triples("Doctors at the Yarmouk hospital treated forty patients."),
            [t(
                "Doctors at the Yarmouk hospital",
                "treated",
                "forty patients"
            )]
        );
    }

    #[test]
    fn provenance_and_classes() {
        let ex = Extractor::default();
        let doc = Document::new(
            "r1",
            "Iraqi Police arrested Ali Jabbar in the Rashid district. He fled.",
        );
        let out = ex.extract_document(&doc);
        assert_eq!(out.sentences, 2);
        let keys: Vec<_> = out
            .triples
            .iter()
            .map(|t| (t.sentence_index, t.triple_index))
            .collect();
        assert_eq!(keys, [(0, 0), (0, 1)]);
        assert_eq!(out.triples[0].subject_class, EntityClass::Organization);
        assert_eq!(out.triples[0].object_class, EntityClass::Person);
        assert_eq!(out.triples[1].object_class, EntityClass::Location);
        assert!(out.triples.iter().all(|t| t.confidence == 1.0));
    }

    #[test]
    fn extraction_is_deterministic_across_corpus_order() {
        let ex = Extractor::default();
        let docs = [
            Document::new("b", "Tupak Sumatra met Hassan Karimi."),
            Document::new("a", "The men spoke to their leader."),
        ];
        let corpus = Corpus::from_documents(
            docs.iter().cloned().map(|d| {
                let id = d.doc_id.clone();
                (d, id)
            }),
            &Default::default(),
        )
        .unwrap();
        let out = ex.extract_corpus(&corpus);
        assert_eq!(out[0].doc_id, "a");
        assert_eq!(out[1].doc_id, "b");
        assert_eq!(out[1], ex.extract_document(&docs[0]));
    }
}
