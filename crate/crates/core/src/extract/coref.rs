//! Nearest-antecedent pronoun resolution with number and gender agreement.

use serde::{Deserialize, Serialize};

use super::lexicon::{Gender, Lexicon, Number};
use super::ner::{EntityClass, Mention};

pub const DEFAULT_WINDOW: usize = 2;

/// Pronoun mention to antecedent mention, ordered by pronoun position.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionMap {
    entries: Vec<(Mention, Mention)>,
}

impl ResolutionMap {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(Mention, Mention)] {
        &self.entries
    }

    /// Antecedent of the pronoun at `(sentence_index, span_start)`.
    pub fn antecedent_at(&self, sentence_index: usize, span_start: usize) -> Option<&Mention> {
        self.entries
            .binary_search_by(|(p, _)| p.position().cmp(&(sentence_index, span_start)))
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn antecedent(&self, pronoun: &Mention) -> Option<&Mention> {
        self.antecedent_at(pronoun.sentence_index, pronoun.span.start)
    }
}

pub fn resolve_coreferences(
    lex: &Lexicon,
    sentences: &[Vec<Mention>],
    window: usize,
) -> ResolutionMap {
    let all: Vec<&Mention> = sentences.iter().flatten().collect();
    let mut entries = Vec::new();
    for (idx, pronoun) in all.iter().enumerate() {
        if !pronoun.pronominal {
            continue;
        }
        let Some(info) = lex.pronouns.get(&pronoun.surface.to_lowercase()) else {
            continue;
        };
        // First and second person ("I", "you") are not anaphoric.
        if info.gender == Gender::None && info.number != Number::Plural {
            continue;
        }
        let earliest = pronoun.sentence_index.saturating_sub(window);
        let compatible = all[..idx]
            .iter()
            .rev()
            .take_while(|m| m.sentence_index >= earliest)
            .filter(|m| !m.pronominal && m.position() < pronoun.position())
            .filter(|m| info.number.agrees_with(m.number))
            .filter(|m| !is_temporal(lex, m))
            .filter(|m| gender_agrees(lex, info.gender, m));
        let chosen = match info.gender {
            Gender::Masculine | Gender::Feminine => {
                let candidates: Vec<&&Mention> = compatible.collect();
                candidates
                    .iter()
                    .find(|m| m.entity_class == EntityClass::Person)
                    .or_else(|| candidates.first())
                    .map(|m| (**m).clone())
            }
            _ => compatible.map(|m| (*m).clone()).next(),
        };
        if let Some(antecedent) = chosen {
            entries.push(((*pronoun).clone(), antecedent));
        }
    }
    entries.sort_by_key(|(p, _)| p.position());
    ResolutionMap { entries }
}

fn is_temporal(lex: &Lexicon, m: &Mention) -> bool {
    m.surface
        .split_whitespace()
        .last()
        .is_some_and(|w| lex.temporal.contains(&w.to_lowercase()))
}

/// Gender of a named mention from its first given name, skipping titles.
fn mention_gender(lex: &Lexicon, m: &Mention) -> Option<Gender> {
    m.surface
        .split_whitespace()
        .filter(|t| t.starts_with(|c: char| c.is_uppercase()))
        .find(|t| {
            !lex.person_titles
                .contains(&t.trim_end_matches('.').to_lowercase())
        })
        .and_then(|t| lex.gender_of_name(t))
}

fn gender_agrees(lex: &Lexicon, pronoun: Gender, m: &Mention) -> bool {
    let named_gender = if matches!(m.entity_class, EntityClass::Person | EntityClass::Unknown) {
        mention_gender(lex, m)
    } else {
        None
    };
    match pronoun {
        Gender::Masculine | Gender::Feminine => {
            !matches!(
                m.entity_class,
                EntityClass::Location | EntityClass::Organization
            ) && named_gender.is_none_or(|g| g == pronoun)
        }
        Gender::Neuter => named_gender.is_none() && m.entity_class != EntityClass::Person,
        Gender::None => true,
    }
}
