//! Seeded generators for synthetic test data: redundancy-heavy triple sets
//! and report-style corpora.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document};
use crate::triple::{sort_by_key, Triple};

const FIRST: &[&str] = &[
    "Ahmed", "Ali", "Faisal", "Hassan", "Hussein", "Ibrahim", "Jamal", "Karim", "Khalid",
    "Mahmoud", "Mustafa", "Omar", "Rashid", "Salim", "Tariq", "Yusuf", "Zaid", "Fatima", "Layla",
    "Mariam", "Noor", "Samira", "Zainab", "Aisha", "Bilal", "Kamal", "Nabil", "Qasim", "Walid",
    "Sami", "Adnan", "Basim", "Dawud", "Emad", "Ghazi", "Haidar", "Ismail", "Jabir", "Latif",
    "Munir",
];
const LAST: &[&str] = &[
    "Farouk", "Karimi", "Jabbar", "Haddad", "Hamdan", "Saleh", "Najjar", "Aziz", "Rahman", "Qasim",
    "Obeidi", "Tikriti", "Dulaimi", "Jubouri", "Shammari", "Zubaidi", "Hashimi", "Khalil",
    "Mansour", "Yasin", "Abbas", "Bakri", "Darwish", "Fadel", "Ghani", "Hakim", "Issa", "Kadhim",
    "Latifi", "Moussa", "Nouri", "Rawi", "Sabri", "Talib", "Wahab", "Younis", "Zaidi", "Amin",
    "Badri", "Hilli",
];
const LOCATIONS: &[&str] = &[
    "Baghdad",
    "Basra",
    "Mosul",
    "Karbala",
    "Najaf",
    "Kirkuk",
    "Fallujah",
    "Ramadi",
    "Tikrit",
    "Samarra",
    "Dora",
    "Karrada",
    "Adhamiyah",
    "Kadhimiya",
    "Mansour",
    "Jadriyah",
    "Sadr City",
    "Abu Ghraib",
    "Diyala",
    "Amil",
];
const ORGS: &[&str] = &[
    "Iraqi Police",
    "Iraqi Army",
    "Ali Baba Group",
    "Baathist Resurgent Cell",
    "Iranian Special Group",
    "Al-Noor Charity Foundation",
    "Sunni Criminal Network",
    "Dora Market Council",
    "Ministry of Interior",
    "Ministry of Health",
    "Mahdi Army",
];
const ADJ: &[&str] = &[
    "old",
    "large",
    "abandoned",
    "northern",
    "southern",
    "eastern",
    "western",
    "main",
    "local",
    "small",
    "armored",
    "civilian",
    "burned",
    "stolen",
    "hidden",
    "second",
    "third",
    "new",
    "damaged",
    "empty",
    "white",
    "black",
    "red",
    "rural",
    "central",
];
const NOUNS: &[&str] = &[
    "depot",
    "convoy",
    "checkpoint",
    "market",
    "mosque",
    "bridge",
    "warehouse",
    "clinic",
    "school",
    "garage",
    "truck",
    "car",
    "compound",
    "station",
    "bunker",
    "farm",
    "bakery",
    "hotel",
    "office",
    "pharmacy",
    "generator",
    "pipeline",
    "shipment",
    "courier",
    "cache",
    "militia",
    "patrol",
    "squad",
    "platoon",
    "cell",
    "weapons",
    "explosives",
    "leaflets",
    "documents",
    "money",
    "fuel",
    "rifles",
    "radios",
    "phones",
    "maps",
];
const VERBS: &[&str] = &[
    "met",
    "called",
    "paid",
    "visited",
    "watched",
    "followed",
    "supplied",
    "threatened",
    "attacked",
    "recruited",
    "hid",
    "moved",
    "sold",
    "bought",
    "carried",
    "delivered",
    "stored",
    "guarded",
    "searched",
    "raided",
    "contacted",
    "warned",
    "hired",
    "trained",
    "funded",
    "smuggled",
    "photographed",
    "questioned",
    "detained",
    "released",
    "traveled",
    "drove",
    "walked",
    "fled",
    "returned",
    "spoke",
    "preached",
    "lectured",
    "argued",
    "negotiated",
    "stole",
    "burned",
    "repaired",
    "inspected",
    "surveyed",
    "mapped",
    "entered",
    "left",
    "approached",
    "avoided",
];
const PREPS: &[&str] = &[
    "", "to", "with", "from", "near", "at", "for", "into", "behind", "toward", "about", "against",
];
const ADVS: &[&str] = &[
    "quietly",
    "secretly",
    "openly",
    "quickly",
    "repeatedly",
    "reportedly",
    "allegedly",
    "briefly",
    "recently",
    "frequently",
    "nervously",
    "angrily",
    "directly",
    "later",
    "again",
];
const MONTHS: &[&str] = &[
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items.choose(rng).expect("non-empty list")
}

fn person(rng: &mut ChaCha8Rng) -> String {
    format!("{} {}", pick(rng, FIRST), pick(rng, LAST))
}

fn entity(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..100) {
        0..=54 => person(rng),
        55..=79 => format!("the {} {}", pick(rng, ADJ), pick(rng, NOUNS)),
        80..=91 => pick(rng, LOCATIONS).to_string(),
        _ => pick(rng, ORGS).to_string(),
    }
}

fn relation(rng: &mut ChaCha8Rng) -> String {
    let verb = pick(rng, VERBS);
    match pick(rng, PREPS) {
        "" => verb.to_string(),
        prep => format!("{verb} {prep}"),
    }
}

/// `count` distinct modifiers, in a random order.
fn modifiers<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str], count: usize) -> Vec<&'a str> {
    let mut all = pool.to_vec();
    all.shuffle(rng);
    all.truncate(count);
    all
}

/// Shape of a generated stress set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StressSpec {
    pub total: usize,
    /// Survivors the family plan aims for; accidental overlaps between
    /// families can lower the pruned count slightly.
    pub planned_survivors: usize,
    pub documents: usize,
    pub sentences_per_document: usize,
    pub seed: u64,
}

impl Default for StressSpec {
    fn default() -> Self {
        StressSpec {
            total: 8603,
            planned_survivors: 4209,
            documents: 1000,
            sentences_per_document: 24,
            seed: 8603,
        }
    }
}

struct Slots {
    next: HashMap<(usize, usize), usize>,
    documents: usize,
    sentences: usize,
}

impl Slots {
    fn sentence(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        (
            rng.gen_range(0..self.documents),
            rng.gen_range(0..self.sentences),
        )
    }

    fn place(&mut self, at: (usize, usize), s: String, r: String, o: String) -> Triple {
        let idx = self.next.entry(at).or_insert(0);
        let t = Triple::new(s, r, o, format!("stress-{:04}", at.0), at.1, *idx);
        *idx += 1;
        t
    }
}

/// Builds a triple set out of redundancy families. A family of size `k + 1`
/// is planned to lose `k` members to one rule: a subject-relation group with
/// progressively richer objects, a subject-object group with richer
/// relations, a relation-object group with richer subjects, or a
/// same-sentence nested chain. Singletons fill the rest.
pub fn stress_triples(spec: &StressSpec) -> Vec<Triple> {
    assert!(spec.planned_survivors >= 1 && spec.planned_survivors <= spec.total);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut slots = Slots {
        next: HashMap::new(),
        documents: spec.documents.max(1),
        sentences: spec.sentences_per_document.max(1),
    };
    let mut out = Vec::with_capacity(spec.total);
    let mut survivors_left = spec.planned_survivors;
    let mut removals_left = spec.total - spec.planned_survivors;
    while survivors_left > 0 {
        let k = if survivors_left == 1 {
            removals_left
        } else {
            let mean = removals_left as f64 / survivors_left as f64;
            let base = mean.floor();
            let mut k = base as usize + usize::from(rng.gen_bool((mean - base).clamp(0.0, 1.0)));
            if k == 1 && rng.gen_bool(0.5) {
                k = if rng.gen_bool(0.5) { 0 } else { 2 };
            }
            k.min(removals_left)
        };
        let (s, r, o) = (entity(&mut rng), relation(&mut rng), entity(&mut rng));
        match (k, rng.gen_range(0..4)) {
            (0, _) => {
                let at = slots.sentence(&mut rng);
                out.push(slots.place(at, s, r, o));
            }
            (_, 0) => {
                let extra = modifiers(&mut rng, ADJ, k.min(ADJ.len()));
                for j in 0..=k {
                    let obj = variant(&o, &extra, j);
                    let at = slots.sentence(&mut rng);
                    out.push(slots.place(at, s.clone(), r.clone(), obj));
                }
            }
            (_, 1) => {
                let extra = modifiers(&mut rng, ADVS, k.min(ADVS.len()));
                for j in 0..=k {
                    let rel = variant(&r, &extra, j);
                    let at = slots.sentence(&mut rng);
                    out.push(slots.place(at, s.clone(), rel, o.clone()));
                }
            }
            (_, 2) => {
                let extra = modifiers(&mut rng, ADJ, k.min(ADJ.len()));
                for j in 0..=k {
                    let subj = variant(&s, &extra, j);
                    let at = slots.sentence(&mut rng);
                    out.push(slots.place(at, subj, r.clone(), o.clone()));
                }
            }
            _ => {
                let at = slots.sentence(&mut rng);
                let mut rel = r.clone();
                let mut obj = o.clone();
                out.push(slots.place(at, s.clone(), rel.clone(), obj.clone()));
                for _ in 0..k {
                    let prep = loop {
                        let p = pick(&mut rng, PREPS);
                        if !p.is_empty() {
                            break p;
                        }
                    };
                    rel = format!("{rel} {obj} {prep}");
                    obj = if rng.gen_bool(0.3) {
                        pick(&mut rng, MONTHS).to_string()
                    } else {
                        entity(&mut rng)
                    };
                    out.push(slots.place(at, s.clone(), rel.clone(), obj.clone()));
                }
            }
        }
        survivors_left -= 1;
        removals_left -= k;
    }
    sort_by_key(&mut out);
    out
}

/// `base` with the first `j` modifiers placed after any leading determiner.
/// When the pool runs short, repeats pad the phrase so it still grows.
fn variant(base: &str, extra: &[&str], j: usize) -> String {
    if j == 0 {
        return base.to_string();
    }
    let mut mods: Vec<&str> = extra.iter().copied().cycle().take(j).collect();
    if extra.is_empty() {
        mods = vec!["very"; j];
    }
    let mods = mods.join(" ");
    match base.strip_prefix("the ") {
        Some(rest) => format!("the {mods} {rest}"),
        None => format!("{mods} {base}"),
    }
}

/// A report-style corpus of `documents` documents with templated sentences,
/// pronouns included, for throughput and determinism checks.
pub fn synthetic_corpus(documents: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let docs = (0..documents)
        .map(|i| {
            let location = pick(&mut rng, LOCATIONS).to_string();
            let sentences = rng.gen_range(8..=14);
            let mut body = Vec::with_capacity(sentences);
            while body.len() < sentences {
                body.push(sentence(&mut rng));
            }
            let mut doc =
                Document::new(format!("syn-{i:05}"), body.join(" ")).with_location(location);
            doc.title = format!("Synthetic report {i}");
            doc.report_time = Some(format!(
                "2010-{:02}-{:02}T{:02}:00:00Z",
                rng.gen_range(1..=12),
                rng.gen_range(1..=28),
                rng.gen_range(0..24)
            ));
            (doc, "synthetic".to_string())
        })
        .collect::<Vec<_>>();
    Corpus::from_documents(docs, &Default::default()).expect("generated documents are valid")
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let p1 = person(rng);
    let p2 = person(rng);
    let place = pick(rng, LOCATIONS);
    let org = pick(rng, ORGS);
    let noun = pick(rng, NOUNS);
    let adj = pick(rng, ADJ);
    let month = pick(rng, MONTHS);
    match rng.gen_range(0..8) {
        0 => format!("{p1} met {p2} in {place}."),
        1 => format!("{p1} traveled to {place} in {month}."),
        2 => format!("{p1} delivered the {noun} to {org}. He returned to {place} later."),
        3 => format!("The {org} raided the {adj} {noun} near {place}."),
        4 => format!("The group of soldiers left the {noun}. They returned to {place}."),
        5 => format!("{p1}, who leads the {adj} cell, threatened {p2}."),
        6 => format!("{p1} preached at the {adj} mosque in {place}."),
        _ => format!("{p1} paid {p2} and called the {org} from {place}."),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stress_set_has_requested_size_and_unique_keys() {
        let spec = StressSpec {
            total: 500,
            planned_survivors: 240,
            documents: 40,
            ..StressSpec::default()
        };
        let t = stress_triples(&spec);
        assert_eq!(t.len(), 500);
        let mut keys: Vec<_> = t.iter().map(Triple::key).collect();
        keys.dedup();
        assert_eq!(keys.len(), 500);
        assert!(t.iter().all(|x| x.validate().is_ok()));
        assert_eq!(stress_triples(&spec), t);
    }

    #[test]
    fn variants_grow() {
        assert_eq!(
            variant("the depot", &["old", "main"], 2),
            "the old main depot"
        );
        assert_eq!(variant("met with", &["quietly"], 1), "quietly met with");
        assert_eq!(variant("Omar", &[], 2), "very very Omar");
    }

    #[test]
    fn corpus_is_deterministic() {
        let a = synthetic_corpus(5, 1);
        assert_eq!(a.len(), 5);
        assert_eq!(a, synthetic_corpus(5, 1));
        assert!(a.documents().iter().all(|d| d.report_location.is_some()));
    }
}
