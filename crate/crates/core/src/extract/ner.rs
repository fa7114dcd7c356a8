//! Gazetteer and orthography based entity recognition.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::lexicon::{Lexicon, Number};
use super::tagger::{chunk, tag_sentence, Chunk, ChunkKind, Tag, Tagged};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default,
)]
#[serde(rename_all = "UPPERCASE")]
pub enum EntityClass {
    Person,
    Organization,
    Location,
    #[default]
    Unknown,
}

impl EntityClass {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityClass::Person => "PERSON",
            EntityClass::Organization => "ORGANIZATION",
            EntityClass::Location => "LOCATION",
            EntityClass::Unknown => "UNKNOWN",
        }
    }
}

impl std::str::FromStr for EntityClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "PERSON" => Ok(EntityClass::Person),
            "ORGANIZATION" => Ok(EntityClass::Organization),
            "LOCATION" => Ok(EntityClass::Location),
            "UNKNOWN" => Ok(EntityClass::Unknown),
            other => Err(format!("unknown entity class {other:?}")),
        }
    }
}

impl std::fmt::Display for EntityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed entity occurrence. `span` is a byte range within the sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mention {
    pub doc_id: String,
    pub sentence_index: usize,
    pub span: Range<usize>,
    pub surface: String,
    pub entity_class: EntityClass,
    pub pronominal: bool,
    pub number: Number,
}

impl Mention {
    /// Document-order key.
    pub fn position(&self) -> (usize, usize) {
        (self.sentence_index, self.span.start)
    }
}

/// A tagged and chunked sentence with one mention per nominal chunk.
pub(crate) struct SentenceAnalysis<'a> {
    pub text: &'a str,
    pub tagged: Vec<Tagged<'a>>,
    pub chunks: Vec<Chunk>,
    /// Index into `mentions` for each chunk that carries one.
    pub chunk_mention: Vec<Option<usize>>,
    pub mentions: Vec<Mention>,
}

const LOCATIVE_PREPS: [&str; 11] = [
    "in", "at", "near", "to", "from", "into", "outside", "toward", "towards", "across", "inside",
];

pub(crate) fn analyze<'a>(
    lex: &Lexicon,
    doc_id: &str,
    sentence: &'a str,
    sentence_index: usize,
) -> SentenceAnalysis<'a> {
    let tagged = tag_sentence(sentence, lex);
    let chunks = chunk(&tagged);
    let mut mentions = Vec::new();
    let mut chunk_mention = Vec::with_capacity(chunks.len());
    for (ci, c) in chunks.iter().enumerate() {
        let prev_prep = ci
            .checked_sub(1)
            .map(|p| &chunks[p])
            .filter(|p| p.kind == ChunkKind::Prep)
            .map(|p| p.text(sentence).to_lowercase());
        let mention = match c.kind {
            ChunkKind::Pronoun => {
                let surface = c.text(sentence).to_string();
                let number = lex
                    .pronouns
                    .get(&surface.to_lowercase())
                    .map_or(Number::Ambiguous, |p| p.number);
                Some(Mention {
                    doc_id: doc_id.to_string(),
                    sentence_index,
                    span: c.span.clone(),
                    surface,
                    entity_class: EntityClass::Unknown,
                    pronominal: true,
                    number,
                })
            }
            ChunkKind::NounPhrase => Some(noun_phrase_mention(
                lex,
                doc_id,
                sentence,
                sentence_index,
                &tagged,
                c,
                prev_prep.as_deref(),
            )),
            _ => None,
        };
        chunk_mention.push(mention.map(|m| {
            mentions.push(m);
            mentions.len() - 1
        }));
    }
    SentenceAnalysis {
        text: sentence,
        tagged,
        chunks,
        chunk_mention,
        mentions,
    }
}

fn noun_phrase_mention(
    lex: &Lexicon,
    doc_id: &str,
    sentence: &str,
    sentence_index: usize,
    tagged: &[Tagged<'_>],
    c: &Chunk,
    prev_prep: Option<&str>,
) -> Mention {
    let toks = &tagged[c.tokens.clone()];
    let named = toks.iter().any(|t| t.tag == Tag::Proper);
    let (span, class) = if named {
        // Names exclude their leading determiners: "the Dyala river" -> "Dyala river".
        let skip = toks
            .iter()
            .take_while(|t| matches!(t.tag, Tag::Det | Tag::Poss))
            .count();
        let start = toks[skip].token.span.start;
        // Class comes from the last possessive segment: "Israeli government's program".
        let seg_start = toks
            .iter()
            .rposition(|t| t.tag == Tag::PossMark)
            .map_or(skip, |p| p + 1);
        let segment: Vec<&str> = toks[seg_start..].iter().map(|t| t.token.text).collect();
        (start..c.span.end, classify_name(lex, &segment, prev_prep))
    } else {
        (c.span.clone(), EntityClass::Unknown)
    };
    let surface = sentence[span.clone()].to_string();
    let number = match class {
        EntityClass::Person | EntityClass::Location => Number::Singular,
        EntityClass::Organization => Number::Ambiguous,
        EntityClass::Unknown => head_number(lex, toks),
    };
    Mention {
        doc_id: doc_id.to_string(),
        sentence_index,
        span,
        surface,
        entity_class: class,
        pronominal: false,
        number,
    }
}

/// Grammatical number from the phrase head: the last token before "of", or the
/// last token of the phrase.
fn head_number(lex: &Lexicon, toks: &[Tagged<'_>]) -> Number {
    let end = toks
        .iter()
        .position(|t| t.tag == Tag::Prep)
        .unwrap_or(toks.len());
    let Some(head) = toks[..end]
        .iter()
        .rev()
        .find(|t| matches!(t.tag, Tag::Noun | Tag::Proper | Tag::Num | Tag::Adj))
    else {
        return Number::Ambiguous;
    };
    let h = head.lower();
    if lex.collective_nouns.contains(&h) {
        Number::Ambiguous
    } else if lex.plural_nouns.contains(&h)
        || (h.len() > 3
            && h.ends_with('s')
            && !h.ends_with("ss")
            && !h.ends_with("us")
            && !h.ends_with("is"))
    {
        Number::Plural
    } else {
        Number::Singular
    }
}

/// Classifies a named phrase. Rules in priority order: exact gazetteer
/// match, contained gazetteer name, title, organization suffix, location head,
/// location token, given name, locative context.
pub fn classify_name(lex: &Lexicon, tokens: &[&str], prev_prep: Option<&str>) -> EntityClass {
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let phrase = lower.join(" ");
    let capitalized = |t: &&str| t.starts_with(|c: char| c.is_uppercase());
    if lex.organizations.contains(&phrase) {
        return EntityClass::Organization;
    }
    if lex.persons.contains(&phrase) {
        return EntityClass::Person;
    }
    if lex.locations.contains(&phrase) {
        return EntityClass::Location;
    }
    let contains = |set: &std::collections::HashSet<String>| {
        (1..lower.len()).rev().any(|n| {
            lower
                .windows(n)
                .any(|w| w.len() >= 2 && set.contains(&w.join(" ")))
        })
    };
    if contains(&lex.organizations) {
        return EntityClass::Organization;
    }
    if contains(&lex.persons) {
        return EntityClass::Person;
    }
    if contains(&lex.locations) {
        return EntityClass::Location;
    }
    let first = lower[0].trim_end_matches('.');
    if lex.person_titles.contains(first) && tokens.iter().skip(1).any(capitalized) {
        return EntityClass::Person;
    }
    if tokens
        .iter()
        .zip(&lower)
        .any(|(t, l)| capitalized(t) && lex.org_suffixes.contains(l))
    {
        return EntityClass::Organization;
    }
    let last = lower.last().map(String::as_str).unwrap_or("");
    if tokens.len() >= 2 && lex.location_heads.contains(last) && tokens.iter().any(capitalized) {
        return EntityClass::Location;
    }
    if lower.iter().any(|t| lex.locations.contains(t)) {
        return EntityClass::Location;
    }
    let proper: Vec<&&str> = tokens.iter().filter(|t| capitalized(t)).collect();
    if let Some(first_proper) = proper.first() {
        if lex.given_names.contains_key(&first_proper.to_lowercase()) {
            return EntityClass::Person;
        }
    }
    let temporal = lower.iter().any(|t| lex.temporal.contains(t));
    if !temporal
        && prev_prep.is_some_and(|p| LOCATIVE_PREPS.contains(&p))
        && tokens.len() <= 3
        && tokens.iter().all(capitalized)
    {
        return EntityClass::Location;
    }
    EntityClass::Unknown
}

/// Mentions of one sentence, ordered by span start.
pub fn recognize_entities(
    lex: &Lexicon,
    doc_id: &str,
    sentence: &str,
    sentence_index: usize,
) -> Vec<Mention> {
    analyze(lex, doc_id, sentence, sentence_index).mentions
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find<'a>(mentions: &'a [Mention], surface: &str) -> &'a Mention {
        mentions
            .iter()
            .find(|m| m.surface == surface)
            .unwrap_or_else(|| panic!("no mention {surface:?} in {mentions:#?}"))
    }

    #[test]
    fn outbreak_sentence_locations() {
        let lex = Lexicon::default();
        let s = "An outbreak of cholera has spread along the Dyala river in eastern Baghdad";
        let m = recognize_entities(&lex, "d", s, 0);
        assert_eq!(find(&m, "Dyala river").entity_class, EntityClass::Location);
        assert_eq!(
            find(&m, "eastern Baghdad").entity_class,
            EntityClass::Location
        );
        assert_eq!(
            find(&m, "An outbreak of cholera").entity_class,
            EntityClass::Unknown
        );
        for w in m.windows(2) {
            assert!(w[0].span.start < w[1].span.start);
        }
        for x in &m {
            assert_eq!(&s[x.span.clone()], x.surface);
        }
    }

    #[test]
    fn stopword_sentence_has_no_mentions() {
        let lex = Lexicon::default();
        assert!(recognize_entities(&lex, "d", "and of the to.", 0).is_empty());
    }

    #[test]
    fn person_by_gazetteer_bigram() {
        let lex = Lexicon::default();
        let m = recognize_entities(&lex, "d", "Tupak Sumatra met the minister", 0);
        assert_eq!(find(&m, "Tupak Sumatra").entity_class, EntityClass::Person);
        let minister = find(&m, "the minister");
        assert_eq!(minister.entity_class, EntityClass::Unknown);
        assert_eq!(minister.number, Number::Singular);
    }

    #[test]
    fn organizations_titles_and_context() {
        let lex = Lexicon::default();
        let s = "Captain Adam Reed met the 2nd Brigade near Falluja Gate in Zubair.";
        let m = recognize_entities(&lex, "d", s, 0);
        assert_eq!(
            find(&m, "Captain Adam Reed").entity_class,
            EntityClass::Person
        );
        assert_eq!(
            find(&m, "2nd Brigade").entity_class,
            EntityClass::Organization
        );
        assert_eq!(find(&m, "Falluja Gate").entity_class, EntityClass::Location);
        assert_eq!(find(&m, "Zubair").entity_class, EntityClass::Location);
    }

    #[test]
    fn pronouns_and_number() {
        let lex = Lexicon::default();
        let m = recognize_entities(&lex, "d", "They met the group of soldiers and the men.", 3);
        let they = find(&m, "They");
        assert!(they.pronominal);
        assert_eq!(they.number, Number::Plural);
        assert_eq!(they.entity_class, EntityClass::Unknown);
        assert_eq!(they.sentence_index, 3);
        assert_eq!(find(&m, "the group of soldiers").number, Number::Ambiguous);
        assert_eq!(find(&m, "the men").number, Number::Plural);
    }

    #[test]
    fn months_are_not_locations_by_context() {
        let lex = Lexicon::default();
        let m = recognize_entities(&lex, "d", "John traveled to eastern Baghdad in January", 0);
        assert_eq!(find(&m, "January").entity_class, EntityClass::Unknown);
        assert_eq!(find(&m, "John").entity_class, EntityClass::Person);
    }
}
