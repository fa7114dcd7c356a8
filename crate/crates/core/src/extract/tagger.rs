//! Lexicon-backed part-of-speech tagging and phrase chunking.

use std::ops::Range;

use super::lexicon::Lexicon;
use crate::text::{tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Det,
    Poss,
    Pron,
    Prep,
    /// Infinitival "to" before a verb.
    InfTo,
    Conj,
    Rel,
    Aux,
    Verb,
    Adv,
    Adj,
    Noun,
    Proper,
    Num,
    /// The possessive clitic `'s`.
    PossMark,
    Comma,
    /// Clause-ending punctuation.
    Stop,
    /// Quotes and brackets, ignored by the chunker.
    Skip,
}

#[derive(Debug, Clone)]
pub struct Tagged<'a> {
    pub token: Token<'a>,
    pub tag: Tag,
}

impl Tagged<'_> {
    pub fn lower(&self) -> String {
        self.token.text.to_lowercase()
    }
}

const NP_INTERNAL: [Tag; 5] = [Tag::Adj, Tag::Noun, Tag::Proper, Tag::Num, Tag::PossMark];

pub fn tag_sentence<'a>(sentence: &'a str, lex: &Lexicon) -> Vec<Tagged<'a>> {
    let tokens = tokenize(sentence);
    let mut tagged: Vec<Tagged<'a>> = Vec::with_capacity(tokens.len());
    for i in 0..tokens.len() {
        let tok = &tokens[i];
        let prev = tagged
            .iter()
            .rev()
            .find(|t| t.tag != Tag::Skip)
            .map(|t| t.tag);
        let initial = prev.is_none();
        let next = tokens.get(i + 1);
        let tag = tag_token(tok, prev, initial, next, lex);
        tagged.push(Tagged {
            token: tok.clone(),
            tag,
        });
    }
    tagged
}

fn tag_token(
    tok: &Token<'_>,
    prev: Option<Tag>,
    initial: bool,
    next: Option<&Token<'_>>,
    lex: &Lexicon,
) -> Tag {
    let text = tok.text;
    let lower = text.to_lowercase();
    if !tok.is_word() {
        if lower == "'s" || lower == "\u{2019}s" {
            return Tag::PossMark;
        }
        return match text {
            "," => Tag::Comma,
            "." | "!" | "?" | ";" | ":" => Tag::Stop,
            "-" | "\u{2013}" | "\u{2014}" => Tag::Comma,
            _ => Tag::Skip,
        };
    }
    if text.starts_with(|c: char| c.is_ascii_digit()) {
        return Tag::Num;
    }
    if is_name_particle(text) {
        return Tag::Proper;
    }
    if tok.is_capitalized() {
        if !initial {
            if lower == "i" {
                return Tag::Pron;
            }
            return Tag::Proper;
        }
        if let Some(tag) = closed_class(&lower, next, lex) {
            return tag;
        }
        let next_capitalized = next.is_some_and(|n| n.is_word() && n.is_capitalized());
        if lex.name_tokens.contains(&lower) || next_capitalized || is_acronym(text) {
            return Tag::Proper;
        }
        return open_class(&lower, prev, next, lex);
    }
    if let Some(tag) = closed_class(&lower, next, lex) {
        return tag;
    }
    open_class(&lower, prev, next, lex)
}

fn is_acronym(text: &str) -> bool {
    text.chars().count() > 1 && text.chars().all(|c| c.is_uppercase() || c == '.')
}

/// Arabic name particles written lowercase: "al-Obeidi", "el-Sayed".
fn is_name_particle(text: &str) -> bool {
    ["al-", "el-", "bin-", "ibn-"].iter().any(|p| {
        text.strip_prefix(p)
            .is_some_and(|rest| rest.starts_with(|c: char| c.is_uppercase()))
    })
}

fn closed_class(lower: &str, next: Option<&Token<'_>>, lex: &Lexicon) -> Option<Tag> {
    let next_lower = next.map(|n| n.text.to_lowercase());
    let next_is_nominal = next.is_some_and(|n| {
        let nl = n.text.to_lowercase();
        n.is_word()
            && !lex.prepositions.contains(&nl)
            && !lex.auxiliaries.contains(&nl)
            && !lex.conjunctions.contains(&nl)
            && !lex.pronouns.contains_key(&nl)
            && !lex.adverbs.contains(&nl)
    });
    if lower == "her" {
        return Some(if next_is_nominal {
            Tag::Poss
        } else {
            Tag::Pron
        });
    }
    if lower == "that" {
        return Some(
            if next_is_nominal
                && !next.is_some_and(|n| lex.verb_forms.contains_key(&n.text.to_lowercase()))
            {
                Tag::Det
            } else {
                Tag::Rel
            },
        );
    }
    if lower == "to" {
        let verb_next = next_lower
            .as_deref()
            .is_some_and(|n| lex.verb_forms.get(n).is_some_and(|base| base == n));
        return Some(if verb_next { Tag::InfTo } else { Tag::Prep });
    }
    if lower == "not" || lower == "never" {
        return Some(Tag::Adv);
    }
    if lex.possessives.contains(lower) {
        return Some(Tag::Poss);
    }
    if lex.pronouns.contains_key(lower) {
        return Some(Tag::Pron);
    }
    if lex.determiners.contains(lower) {
        return Some(Tag::Det);
    }
    if lex.auxiliaries.contains(lower) {
        return Some(Tag::Aux);
    }
    if lex.prepositions.contains(lower) {
        return Some(Tag::Prep);
    }
    if lex.conjunctions.contains(lower) {
        return Some(Tag::Conj);
    }
    if lex.relativizers.contains(lower) {
        return Some(Tag::Rel);
    }
    if lex.adverbs.contains(lower) {
        return Some(Tag::Adv);
    }
    None
}

fn open_class(lower: &str, prev: Option<Tag>, next: Option<&Token<'_>>, lex: &Lexicon) -> Tag {
    let after_modifier = matches!(
        prev,
        Some(Tag::Det | Tag::Poss | Tag::Adj | Tag::Num | Tag::PossMark)
    );
    let verbal_context = matches!(
        prev,
        None | Some(
            Tag::Noun
                | Tag::Proper
                | Tag::Pron
                | Tag::Aux
                | Tag::Adv
                | Tag::InfTo
                | Tag::Rel
                | Tag::Conj
                | Tag::Comma
        )
    );
    if lex.direction_modifiers.contains(lower) && next.is_some_and(|n| n.is_word()) {
        return Tag::Adj;
    }
    if lex.verb_forms.contains_key(lower) {
        let next_is_past = next.is_some_and(|n| is_past_verb(&n.text.to_lowercase(), lex));
        if next_is_past && !matches!(prev, Some(Tag::Aux | Tag::InfTo)) {
            return Tag::Noun;
        }
        if after_modifier {
            return if lower.ends_with("ed") || lower.ends_with("ing") {
                Tag::Adj
            } else {
                Tag::Noun
            };
        }
        if lex.nouns.contains(lower) {
            let strongly_verbal = matches!(
                prev,
                Some(Tag::Noun | Tag::Proper | Tag::Pron | Tag::Aux | Tag::InfTo | Tag::Rel)
            );
            return if strongly_verbal {
                Tag::Verb
            } else {
                Tag::Noun
            };
        }
        if prev == Some(Tag::Verb) {
            return Tag::Noun;
        }
        if lower.ends_with("ing") && prev != Some(Tag::Aux) {
            return Tag::Noun;
        }
        return if verbal_context { Tag::Verb } else { Tag::Noun };
    }
    if lex.nouns.contains(lower) || lex.temporal.contains(lower) {
        return Tag::Noun;
    }
    if lower.ends_with("ly") && lower.len() > 4 {
        return Tag::Adv;
    }
    if lower.ends_with("ed") && lower.len() > 4 {
        return if after_modifier || !verbal_context || prev == Some(Tag::Verb) {
            Tag::Adj
        } else {
            Tag::Verb
        };
    }
    if lower.ends_with("ing") && lower.len() > 5 {
        return if prev == Some(Tag::Aux) {
            Tag::Verb
        } else {
            Tag::Noun
        };
    }
    const ADJ_SUFFIXES: [&str; 9] = [
        "al", "ous", "ive", "ic", "ful", "ish", "able", "ible", "ary",
    ];
    if ADJ_SUFFIXES.iter().any(|s| lower.ends_with(s)) && lower.len() > 4 {
        // Before a past verb or outside a word run it heads the phrase.
        let heads = next.is_none_or(|n| !n.is_word() || is_past_verb(&n.text.to_lowercase(), lex));
        return if heads { Tag::Noun } else { Tag::Adj };
    }
    Tag::Noun
}

/// An inflected verb form that cannot be read as a noun ("exploded", "left").
fn is_past_verb(lower: &str, lex: &Lexicon) -> bool {
    if lex.nouns.contains(lower) {
        return false;
    }
    match lex.verb_forms.get(lower) {
        Some(base) if lower.ends_with("ed") => base != lower,
        Some(base) => base != lower && !lower.ends_with('s') && !lower.ends_with("ing"),
        None => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChunkKind {
    NounPhrase,
    Pronoun,
    VerbGroup,
    Prep,
    Conj,
    Rel,
    Comma,
    Adv,
    Stop,
    Other,
}

/// A run of tagged tokens; `tokens` indexes into the sentence's token list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub kind: ChunkKind,
    pub tokens: Range<usize>,
    /// Byte span within the sentence.
    pub span: Range<usize>,
}

impl Chunk {
    pub fn text<'a>(&self, sentence: &'a str) -> &'a str {
        &sentence[self.span.clone()]
    }

    pub fn is_nominal(&self) -> bool {
        matches!(self.kind, ChunkKind::NounPhrase | ChunkKind::Pronoun)
    }
}

pub fn chunk(tagged: &[Tagged<'_>]) -> Vec<Chunk> {
    let mut chunks = Vec::new();
    let tags: Vec<Tag> = tagged.iter().map(|t| t.tag).collect();
    let mut i = 0;
    while i < tags.len() {
        let start = i;
        let kind = match tags[i] {
            Tag::Skip => {
                i += 1;
                continue;
            }
            Tag::Pron => {
                i += 1;
                ChunkKind::Pronoun
            }
            Tag::Det | Tag::Poss | Tag::Adj | Tag::Noun | Tag::Proper | Tag::Num => {
                match noun_phrase_end(&tags, i, tagged) {
                    Some(end) => {
                        i = end;
                        ChunkKind::NounPhrase
                    }
                    None => {
                        i += 1;
                        ChunkKind::Other
                    }
                }
            }
            Tag::Aux | Tag::Verb => {
                i = verb_group_end(&tags, i);
                ChunkKind::VerbGroup
            }
            Tag::Adv => {
                // An adverb directly before a verb joins the verb group.
                let mut j = i;
                while j < tags.len() && tags[j] == Tag::Adv {
                    j += 1;
                }
                if j < tags.len() && matches!(tags[j], Tag::Verb | Tag::Aux) {
                    i = verb_group_end(&tags, j);
                    ChunkKind::VerbGroup
                } else {
                    i = j;
                    ChunkKind::Adv
                }
            }
            Tag::InfTo => {
                if i + 1 < tags.len() && tags[i + 1] == Tag::Verb {
                    i = verb_group_end(&tags, i + 1);
                    ChunkKind::VerbGroup
                } else {
                    i += 1;
                    ChunkKind::Prep
                }
            }
            Tag::Prep => {
                i += 1;
                ChunkKind::Prep
            }
            Tag::Conj => {
                i += 1;
                ChunkKind::Conj
            }
            Tag::Rel => {
                i += 1;
                ChunkKind::Rel
            }
            Tag::Comma => {
                i += 1;
                ChunkKind::Comma
            }
            Tag::Stop => {
                i += 1;
                ChunkKind::Stop
            }
            Tag::PossMark => {
                i += 1;
                ChunkKind::Other
            }
        };
        let span = tagged[start].token.span.start..tagged[i - 1].token.span.end;
        chunks.push(Chunk {
            kind,
            tokens: start..i,
            span,
        });
    }
    chunks
}

/// Returns the exclusive end of a noun phrase starting at `start`, or `None`
/// when the run has no nominal head.
fn noun_phrase_end(tags: &[Tag], start: usize, tagged: &[Tagged<'_>]) -> Option<usize> {
    let mut i = start;
    while i < tags.len() && matches!(tags[i], Tag::Det | Tag::Poss) {
        i += 1;
    }
    let mut end = None;
    loop {
        while i < tags.len() {
            match tags[i] {
                Tag::PossMark => {
                    // 's must be followed by more of the phrase.
                    if i + 1 < tags.len() && NP_INTERNAL.contains(&tags[i + 1]) {
                        i += 1;
                    } else {
                        break;
                    }
                }
                t if NP_INTERNAL.contains(&t) => {
                    i += 1;
                    if matches!(t, Tag::Noun | Tag::Proper | Tag::Num | Tag::Adj) {
                        end = Some(i);
                    }
                }
                _ => break,
            }
        }
        // "X of Y" stays one phrase.
        let is_of = i < tags.len() && tags[i] == Tag::Prep && tagged[i].lower() == "of";
        if is_of && end == Some(i) {
            let mut j = i + 1;
            while j < tags.len() && matches!(tags[j], Tag::Det | Tag::Poss) {
                j += 1;
            }
            if j < tags.len() && NP_INTERNAL.contains(&tags[j]) && tags[j] != Tag::PossMark {
                i = j;
                continue;
            }
        }
        break;
    }
    end
}

fn verb_group_end(tags: &[Tag], start: usize) -> usize {
    let mut i = start;
    while i < tags.len() {
        match tags[i] {
            Tag::Aux | Tag::Verb => i += 1,
            Tag::Adv if i + 1 < tags.len() && matches!(tags[i + 1], Tag::Verb | Tag::Aux) => i += 1,
            Tag::InfTo if i + 1 < tags.len() && tags[i + 1] == Tag::Verb => i += 1,
            _ => break,
        }
    }
    i
}
