//! Gazetteers and closed word lists backing the rule-based extractor.
//!
//! Every list is a UTF-8 file with one entry per line and `#` comments. The
//! built-in copies are compiled in; [`Lexicon::from_dir`] overrides any file
//! found in a directory with the same name.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    Masculine,
    Feminine,
    Neuter,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Number {
    Singular,
    Plural,
    Ambiguous,
}

impl Number {
    pub fn agrees_with(self, other: Number) -> bool {
        self == Number::Ambiguous || other == Number::Ambiguous || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PronounInfo {
    pub number: Number,
    pub gender: Gender,
}

macro_rules! builtin {
    ($($name:literal => $path:literal),* $(,)?) => {
        const BUILTIN: &[(&str, &str)] = &[$(($name, include_str!($path))),*];
    };
}

builtin! {
    "abbreviations" => "../../data/lexicon/abbreviations.txt",
    "pronouns" => "../../data/lexicon/pronouns.txt",
    "possessives" => "../../data/lexicon/possessives.txt",
    "determiners" => "../../data/lexicon/determiners.txt",
    "prepositions" => "../../data/lexicon/prepositions.txt",
    "auxiliaries" => "../../data/lexicon/auxiliaries.txt",
    "conjunctions" => "../../data/lexicon/conjunctions.txt",
    "relativizers" => "../../data/lexicon/relativizers.txt",
    "adverbs" => "../../data/lexicon/adverbs.txt",
    "temporal" => "../../data/lexicon/temporal.txt",
    "collective_nouns" => "../../data/lexicon/collective_nouns.txt",
    "plural_nouns" => "../../data/lexicon/plural_nouns.txt",
    "nouns" => "../../data/lexicon/nouns.txt",
    "verbs" => "../../data/lexicon/verbs.txt",
    "irregular_verbs" => "../../data/lexicon/irregular_verbs.txt",
    "persons" => "../../data/gazetteer/persons.txt",
    "male_names" => "../../data/gazetteer/male_names.txt",
    "female_names" => "../../data/gazetteer/female_names.txt",
    "person_titles" => "../../data/gazetteer/person_titles.txt",
    "organizations" => "../../data/gazetteer/organizations.txt",
    "org_suffixes" => "../../data/gazetteer/org_suffixes.txt",
    "locations" => "../../data/gazetteer/locations.txt",
    "location_heads" => "../../data/gazetteer/location_heads.txt",
    "direction_modifiers" => "../../data/gazetteer/direction_modifiers.txt",
}

/// Names of every list the lexicon reads, as `<name>.txt`.
pub fn list_names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(name, _)| *name)
}

fn entries(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn lower_set(text: &str) -> HashSet<String> {
    entries(text).map(str::to_lowercase).collect()
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub abbreviations: String,
    pub pronouns: HashMap<String, PronounInfo>,
    pub possessives: HashSet<String>,
    pub determiners: HashSet<String>,
    pub prepositions: HashSet<String>,
    pub auxiliaries: HashSet<String>,
    pub conjunctions: HashSet<String>,
    pub relativizers: HashSet<String>,
    pub adverbs: HashSet<String>,
    pub temporal: HashSet<String>,
    pub collective_nouns: HashSet<String>,
    pub plural_nouns: HashSet<String>,
    pub nouns: HashSet<String>,
    /// Every inflected verb form mapped to its base form.
    pub verb_forms: HashMap<String, String>,
    pub persons: HashSet<String>,
    pub given_names: HashMap<String, Gender>,
    pub person_titles: HashSet<String>,
    pub organizations: HashSet<String>,
    pub org_suffixes: HashSet<String>,
    pub locations: HashSet<String>,
    pub location_heads: HashSet<String>,
    pub direction_modifiers: HashSet<String>,
    /// Lowercased tokens of every gazetteer name, for sentence-initial tagging.
    pub name_tokens: HashSet<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::from_sources(|name| Ok(builtin_text(name).to_string()))
            .expect("built-in lexicon parses")
    }
}

fn builtin_text(name: &str) -> &'static str {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .expect("known list name")
}

impl Lexicon {
    /// Loads lists from `dir`, falling back to the built-in copy for any
    /// `<name>.txt` that is absent.
    pub fn from_dir(dir: &Path) -> Result<Lexicon> {
        Lexicon::from_sources(|name| {
            let path = dir.join(format!("{name}.txt"));
            if path.is_file() {
                fs::read_to_string(&path).map_err(|e| Error::io(&path, e))
            } else {
                Ok(builtin_text(name).to_string())
            }
        })
    }

    fn from_sources(mut read: impl FnMut(&str) -> Result<String>) -> Result<Lexicon> {
        let mut pronouns = HashMap::new();
        for line in entries(&read("pronouns")?) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Lexicon {
                name: "pronouns".into(),
                message: format!("expected `word number gender`, got {line:?}"),
            };
            let [word, number, gender] = fields[..] else {
                return Err(bad());
            };
            let number = match number {
                "singular" => Number::Singular,
                "plural" => Number::Plural,
                "ambiguous" => Number::Ambiguous,
                _ => return Err(bad()),
            };
            let gender = match gender {
                "masculine" => Gender::Masculine,
                "feminine" => Gender::Feminine,
                "neuter" => Gender::Neuter,
                "none" => Gender::None,
                _ => return Err(bad()),
            };
            pronouns.insert(word.to_lowercase(), PronounInfo { number, gender });
        }

        let mut verb_forms = HashMap::new();
        for base in entries(&read("verbs")?) {
            let base = base.to_lowercase();
            for form in regular_inflections(&base) {
                verb_forms.entry(form).or_insert_with(|| base.clone());
            }
        }
        for line in entries(&read("irregular_verbs")?) {
            let forms: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
            let Some(base) = forms.first().cloned() else {
                continue;
            };
            let mut all = regular_present(&base);
            all.extend(forms.iter().skip(1).cloned());
            for form in all {
                verb_forms.insert(form, base.clone());
            }
        }

        let mut given_names = HashMap::new();
        for name in entries(&read("male_names")?) {
            given_names.insert(name.to_lowercase(), Gender::Masculine);
        }
        for name in entries(&read("female_names")?) {
            given_names.insert(name.to_lowercase(), Gender::Feminine);
        }

        let persons = lower_set(&read("persons")?);
        let organizations = lower_set(&read("organizations")?);
        let locations = lower_set(&read("locations")?);
        let person_titles: HashSet<String> = entries(&read("person_titles")?)
            .map(|t| t.trim_end_matches('.').to_lowercase())
            .collect();
        let name_tokens = persons
            .iter()
            .chain(&organizations)
            .chain(&locations)
            .flat_map(|n| n.split_whitespace().map(str::to_string))
            .chain(given_names.keys().cloned())
            .chain(person_titles.iter().cloned())
            .collect();

        Ok(Lexicon {
            abbreviations: read("abbreviations")?,
            pronouns,
            possessives: lower_set(&read("possessives")?),
            determiners: lower_set(&read("determiners")?),
            prepositions: lower_set(&read("prepositions")?),
            auxiliaries: lower_set(&read("auxiliaries")?),
            conjunctions: lower_set(&read("conjunctions")?),
            relativizers: lower_set(&read("relativizers")?),
            adverbs: lower_set(&read("adverbs")?),
            temporal: lower_set(&read("temporal")?),
            collective_nouns: lower_set(&read("collective_nouns")?),
            plural_nouns: lower_set(&read("plural_nouns")?),
            nouns: lower_set(&read("nouns")?),
            verb_forms,
            persons,
            given_names,
            person_titles,
            organizations,
            org_suffixes: lower_set(&read("org_suffixes")?),
            locations,
            location_heads: lower_set(&read("location_heads")?),
            direction_modifiers: lower_set(&read("direction_modifiers")?),
            name_tokens,
        })
    }

    pub fn is_pronoun(&self, word: &str) -> bool {
        self.pronouns.contains_key(&word.to_lowercase())
    }

    pub fn gender_of_name(&self, given: &str) -> Option<Gender> {
        self.given_names.get(&given.to_lowercase()).copied()
    }
}

fn regular_present(base: &str) -> Vec<String> {
    let third = if base.ends_with('y') && !ends_with_vowel_y(base) {
        format!("{}ies", &base[..base.len() - 1])
    } else if ["s", "sh", "ch", "x", "z", "o"]
        .iter()
        .any(|s| base.ends_with(s))
    {
        format!("{base}es")
    } else {
        format!("{base}s")
    };
    let ing = if let Some(stem) = base.strip_suffix("ie") {
        format!("{stem}ying")
    } else if base.ends_with('e') && !base.ends_with("ee") {
        format!("{}ing", &base[..base.len() - 1])
    } else {
        format!("{base}ing")
    };
    let mut forms = vec![base.to_string(), third, ing];
    if doubles_final_consonant(base) {
        let last = base.chars().last().expect("non-empty");
        forms.push(format!("{base}{last}ing"));
    }
    forms
}

fn regular_inflections(base: &str) -> Vec<String> {
    let mut forms = regular_present(base);
    let past = if base.ends_with('e') {
        format!("{base}d")
    } else if base.ends_with('y') && !ends_with_vowel_y(base) {
        format!("{}ied", &base[..base.len() - 1])
    } else {
        format!("{base}ed")
    };
    forms.push(past);
    if doubles_final_consonant(base) {
        let last = base.chars().last().expect("non-empty");
        forms.push(format!("{base}{last}ed"));
    }
    forms
}

fn ends_with_vowel_y(base: &str) -> bool {
    let b = base.as_bytes();
    b.len() >= 2 && matches!(b[b.len() - 2], b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Consonant-vowel-consonant endings ("plan", "kidnap", "travel").
fn doubles_final_consonant(base: &str) -> bool {
    let b = base.as_bytes();
    if b.len() < 3 {
        return false;
    }
    let vowel = |c: u8| matches!(c, b'a' | b'e' | b'i' | b'o' | b'u');
    let (c1, v, c2) = (b[b.len() - 3], b[b.len() - 2], b[b.len() - 1]);
    !vowel(c1) && vowel(v) && !vowel(c2) && !matches!(c2, b'w' | b'x' | b'y')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_lexicon_loads() {
        let lex = Lexicon::default();
        assert_eq!(lex.pronouns["they"].number, Number::Plural);
        assert_eq!(lex.pronouns["she"].gender, Gender::Feminine);
        assert!(lex.persons.contains("tupak sumatra"));
        assert!(lex.org_suffixes.contains("brigade"));
        assert_eq!(lex.gender_of_name("Mary"), Some(Gender::Feminine));
        assert_eq!(lex.gender_of_name("John"), Some(Gender::Masculine));
    }

    #[test]
    fn verb_inflections() {
        let lex = Lexicon::default();
        for (form, base) in [
            ("traveled", "travel"),
            ("travelled", "travel"),
            ("kidnapped", "kidnap"),
            ("supplied", "supply"),
            ("preached", "preach"),
            ("preaches", "preach"),
            ("spoke", "speak"),
            ("left", "leave"),
            ("met", "meet"),
            ("works", "work"),
            ("identified", "identify"),
        ] {
            assert_eq!(
                lex.verb_forms.get(form).map(String::as_str),
                Some(base),
                "{form}"
            );
        }
    }

    #[test]
    fn directory_overrides_single_list() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("persons.txt"), "# test\nJane Roe\n").unwrap();
        let lex = Lexicon::from_dir(dir.path()).unwrap();
        assert!(lex.persons.contains("jane roe"));
        assert!(!lex.persons.contains("tupak sumatra"));
        assert!(lex.locations.contains("baghdad"));
    }

    #[test]
    fn malformed_pronoun_list_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("pronouns.txt"), "he singular\n").unwrap();
        assert!(matches!(
            Lexicon::from_dir(dir.path()),
            Err(Error::Lexicon { .. })
        ));
    }
}
