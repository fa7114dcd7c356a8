//! Redundancy pruning by domination: a triple is deleted when another triple
//! agrees with it on two fields and carries more information in the third, or
//! when a same-sentence triple's relation already spells out its object.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::text::{contains_token_sequence, normalize_field, token_count};
use crate::triple::{Triple, TripleKey};

/// Information carried by a normalized field. Tokens first, characters break ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InfoScore {
    pub tokens: usize,
    pub chars: usize,
}

impl InfoScore {
    fn of(normalized: &str) -> Self {
        InfoScore {
            tokens: token_count(normalized),
            chars: normalized.chars().count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTriple {
    pub original: Triple,
    pub norm_subject: String,
    pub norm_relation: String,
    pub norm_object: String,
    pub info_subject: InfoScore,
    pub info_relation: InfoScore,
    pub info_object: InfoScore,
}

/// A field that normalizes to nothing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("triple {key}: {field} is empty after normalization")]
pub struct EmptyField {
    pub key: TripleKey,
    pub field: &'static str,
}

pub fn normalize(t: &Triple) -> Result<NormalizedTriple, EmptyField> {
    let field = |name: &'static str, raw: &str| {
        let n = normalize_field(raw);
        if n.is_empty() {
            Err(EmptyField {
                key: t.key(),
                field: name,
            })
        } else {
            Ok(n)
        }
    };
    let norm_subject = field("subject", &t.subject)?;
    let norm_relation = field("relation", &t.relation)?;
    let norm_object = field("object", &t.object)?;
    Ok(NormalizedTriple {
        original: t.clone(),
        info_subject: InfoScore::of(&norm_subject),
        info_relation: InfoScore::of(&norm_relation),
        info_object: InfoScore::of(&norm_object),
        norm_subject,
        norm_relation,
        norm_object,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Same subject and relation; the poorer object loses.
    R1,
    /// Same subject and object; the poorer relation loses.
    R2,
    /// Same relation and object; the poorer subject loses.
    R3,
    /// Relation contains another same-sentence triple's object; that triple loses.
    R4,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", self.index() + 1)
    }
}

impl FromStr for Rule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "R1" => Ok(Rule::R1),
            "R2" => Ok(Rule::R2),
            "R3" => Ok(Rule::R3),
            "R4" => Ok(Rule::R4),
            other => Err(format!("unknown rule {other:?}")),
        }
    }
}

/// Which rules a prune run applies. All enabled by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub enabled: [bool; 4],
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { enabled: [true; 4] }
    }
}

impl RuleSet {
    pub fn only(rules: &[Rule]) -> Self {
        let mut enabled = [false; 4];
        for r in rules {
            enabled[r.index()] = true;
        }
        RuleSet { enabled }
    }

    pub fn set(&mut self, rule: Rule, on: bool) {
        self.enabled[rule.index()] = on;
    }

    pub fn contains(&self, rule: Rule) -> bool {
        self.enabled[rule.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    pub removed: TripleKey,
    pub survivor: TripleKey,
    pub rule: Rule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneReport {
    pub input_count: usize,
    pub output_count: usize,
    pub removals: Vec<Removal>,
    pub passes: usize,
    /// Triples dropped before pruning because a field normalized to nothing.
    /// Not part of `input_count`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub discarded: Vec<TripleKey>,
}

impl PruneReport {
    pub fn count_by_rule(&self, rule: Rule) -> usize {
        self.removals.iter().filter(|r| r.rule == rule).count()
    }

    pub fn survivor_ratio(&self) -> f64 {
        if self.input_count == 0 {
            1.0
        } else {
            self.output_count as f64 / self.input_count as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Prunes with all four rules.
pub fn prune(triples: &[Triple]) -> (Vec<Triple>, PruneReport) {
    prune_with(triples, RuleSet::default())
}

/// Applies the enabled rules in order R1..R4, pass after pass, until a pass
/// removes nothing. Survivors come back in provenance-key order.
pub fn prune_with(triples: &[Triple], rules: RuleSet) -> (Vec<Triple>, PruneReport) {
    let mut discarded = Vec::new();
    let mut items: Vec<NormalizedTriple> = Vec::with_capacity(triples.len());
    for t in triples {
        match normalize(t) {
            Ok(n) => items.push(n),
            Err(e) => {
                log::warn!("discarding {e}");
                discarded.push(e.key);
            }
        }
    }
    items.sort_by(|a, b| total_order(&a.original, &b.original));
    discarded.sort();

    let mut alive = vec![true; items.len()];
    let mut removals = Vec::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let before = removals.len();
        for rule in Rule::ALL {
            if rules.contains(rule) {
                apply_rule(rule, &items, &mut alive, &mut removals);
            }
        }
        if removals.len() == before {
            break;
        }
    }

    let survivors: Vec<Triple> = items
        .into_iter()
        .zip(&alive)
        .filter(|(_, a)| **a)
        .map(|(n, _)| n.original)
        .collect();
    let report = PruneReport {
        input_count: alive.len(),
        output_count: survivors.len(),
        removals,
        passes,
        discarded,
    };
    (survivors, report)
}

/// Runs one rule over the live set (one sweep reaches that rule's fixed point).
pub fn apply_rule(
    rule: Rule,
    items: &[NormalizedTriple],
    alive: &mut [bool],
    removals: &mut Vec<Removal>,
) {
    match rule {
        Rule::R1 => apply_group_rule(rule, items, alive, removals, |n| {
            ((&n.norm_subject, &n.norm_relation), n.info_object)
        }),
        Rule::R2 => apply_group_rule(rule, items, alive, removals, |n| {
            ((&n.norm_subject, &n.norm_object), n.info_relation)
        }),
        Rule::R3 => apply_group_rule(rule, items, alive, removals, |n| {
            ((&n.norm_relation, &n.norm_object), n.info_subject)
        }),
        Rule::R4 => apply_crossover(items, alive, removals),
    }
}

/// Within each group, every member except the richest is removed. `items`
/// must be in provenance order so the earliest key wins full ties.
fn apply_group_rule<'a, F>(
    rule: Rule,
    items: &'a [NormalizedTriple],
    alive: &mut [bool],
    removals: &mut Vec<Removal>,
    key: F,
) where
    F: Fn(&'a NormalizedTriple) -> ((&'a String, &'a String), InfoScore),
{
    let mut groups: HashMap<(&String, &String), Vec<usize>> = HashMap::new();
    for (i, n) in items.iter().enumerate() {
        if alive[i] {
            groups.entry(key(n).0).or_default().push(i);
        }
    }
    let mut pending = Vec::new();
    for members in groups.into_values() {
        if members.len() < 2 {
            continue;
        }
        // Highest score wins; among equals the lowest index (earliest key).
        let winner = *members
            .iter()
            .max_by(|&&a, &&b| key(&items[a]).1.cmp(&key(&items[b]).1).then(b.cmp(&a)))
            .expect("non-empty group");
        for &m in &members {
            if m != winner {
                pending.push((m, winner));
            }
        }
    }
    pending.sort_unstable();
    for (loser, winner) in pending {
        alive[loser] = false;
        removals.push(Removal {
            removed: items[loser].original.key(),
            survivor: items[winner].original.key(),
            rule,
        });
    }
}

fn apply_crossover(items: &[NormalizedTriple], alive: &mut [bool], removals: &mut Vec<Removal>) {
    // Items are key-sorted, so each sentence is a contiguous run.
    let mut start = 0;
    while start < items.len() {
        let sentence = |i: usize| {
            let o = &items[i].original;
            (&o.doc_id, o.sentence_index)
        };
        let mut end = start + 1;
        while end < items.len() && sentence(end) == sentence(start) {
            end += 1;
        }
        for a in start..end {
            if !alive[a] {
                continue;
            }
            for b in start..end {
                if b != a
                    && alive[b]
                    && contains_token_sequence(&items[a].norm_relation, &items[b].norm_object)
                {
                    alive[b] = false;
                    removals.push(Removal {
                        removed: items[b].original.key(),
                        survivor: items[a].original.key(),
                        rule: Rule::R4,
                    });
                }
            }
        }
        start = end;
    }
}

/// Provenance key first; field contents settle duplicate keys so any input
/// permutation sorts identically.
fn total_order(a: &Triple, b: &Triple) -> Ordering {
    a.key_ref()
        .cmp(&b.key_ref())
        .then_with(|| a.subject.cmp(&b.subject))
        .then_with(|| a.relation.cmp(&b.relation))
        .then_with(|| a.object.cmp(&b.object))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, r: &str, o: &str, sent: usize, idx: usize) -> Triple {
        Triple::new(s, r, o, "d", sent, idx)
    }

    fn surviving(triples: &[Triple]) -> Vec<(String, String, String)> {
        prune(triples)
            .0
            .into_iter()
            .map(|t| (t.subject, t.relation, t.object))
            .collect()
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&t("The men", "spoke to", "their leader", 0, 0)).unwrap();
        assert_eq!(
            (
                n.norm_subject.as_str(),
                n.norm_relation.as_str(),
                n.norm_object.as_str()
            ),
            ("men", "spoke to", "their leader")
        );
        assert_eq!(
            (
                n.info_subject.tokens,
                n.info_relation.tokens,
                n.info_object.tokens
            ),
            (1, 2, 2)
        );
        let n = normalize(&t("  JOHN ", "Traveled To", "Baghdad.", 0, 0)).unwrap();
        assert_eq!(n.norm_object, "baghdad");
        assert!(normalize(&t("the", "r", "o", 0, 0)).is_err());
    }

    #[test]
    fn subject_relation_keeps_richest_object() {
        let got = surviving(&[
            t("john", "traveled to", "baghdad", 0, 0),
            t("john", "traveled to", "eastern baghdad", 1, 0),
        ]);
        assert_eq!(
            got,
            [(
                "john".into(),
                "traveled to".into(),
                "eastern baghdad".into()
            )]
        );
    }

    #[test]
    fn identical_triples_keep_earliest_key() {
        let (kept, report) = prune(&[t("x", "r", "y", 3, 0), t("x", "r", "y", 1, 0)]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].sentence_index, 1);
        assert_eq!(report.removals[0].rule, Rule::R1);
    }

    #[test]
    fn subject_object_three_way_group() {
        let (kept, report) = prune(&[
            t("john", "spoke to", "leader", 0, 0),
            t("john", "spoke quietly to", "leader", 1, 0),
            t("john", "met", "leader", 2, 0),
        ]);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].relation, "spoke quietly to");
        assert_eq!(report.count_by_rule(Rule::R2), 2);
    }

    #[test]
    fn relation_object_uses_subject_info_and_char_tiebreak() {
        let got = surviving(&[
            t("the squad", "entered", "the bunker", 0, 0),
            t("the second squad", "entered", "the bunker", 1, 0),
        ]);
        assert_eq!(got[0].0, "the second squad");
        let got = surviving(&[
            t("squad", "entered", "bunker", 0, 0),
            t("platoon", "entered", "bunker", 1, 0),
        ]);
        assert_eq!(got, [("platoon".into(), "entered".into(), "bunker".into())]);
    }

    #[test]
    fn crossover_is_sentence_scoped() {
        let nested = [
            t("john", "traveled to", "eastern baghdad", 0, 0),
            t("john", "traveled to eastern baghdad in", "january", 0, 1),
        ];
        let (kept, report) = prune(&nested);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].object, "january");
        assert_eq!(report.removals[0].rule, Rule::R4);

        let apart = [
            t("john", "traveled to", "eastern baghdad", 0, 0),
            t("omar", "traveled to eastern baghdad in", "january", 1, 0),
        ];
        assert_eq!(prune(&apart).0.len(), 2);
    }

    #[test]
    fn crossover_matches_whole_tokens() {
        let kept = prune(&[t("a1", "ran from", "x", 0, 0), t("b1", "fled", "ran", 0, 1)]).0;
        assert_eq!(kept.len(), 1);
        let kept = prune(&[
            t("a1", "traveled to iran", "x", 0, 0),
            t("b1", "fled", "ran", 0, 1),
        ])
        .0;
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn worked_fixture_removes_one_per_rule() {
        let (kept, report) = prune(&[
            t("john", "traveled to", "baghdad", 0, 0),
            t("john", "traveled to", "eastern baghdad", 1, 0),
            t("john", "spoke to", "leader", 2, 0),
            t("john", "spoke quietly to", "leader", 3, 0),
            t("the squad", "entered", "the bunker", 4, 0),
            t("the second squad", "entered", "the bunker", 5, 0),
        ]);
        assert_eq!(kept.len(), 3);
        for rule in [Rule::R1, Rule::R2, Rule::R3] {
            assert_eq!(report.count_by_rule(rule), 1, "{rule}");
        }
        assert_eq!(
            report.output_count,
            report.input_count - report.removals.len()
        );
    }

    #[test]
    fn empty_input_takes_one_pass() {
        let (kept, report) = prune(&[]);
        assert!(kept.is_empty());
        assert_eq!((report.passes, report.removals.len()), (1, 0));
    }

    #[test]
    fn disabled_rules_are_skipped() {
        let input = [t("x", "r", "y", 0, 0), t("x", "r", "long y", 1, 0)];
        let (kept, _) = prune_with(&input, RuleSet::only(&[Rule::R2, Rule::R3]));
        assert_eq!(kept.len(), 2);
    }

    #[test]
    fn empty_fields_are_discarded_and_reported() {
        let (kept, report) = prune(&[t("x", "r", "y", 0, 0), t("an", "r", "y", 1, 0)]);
        assert_eq!(kept.len(), 1);
        assert_eq!(report.input_count, 1);
        assert_eq!(report.discarded.len(), 1);
    }

    #[test]
    fn rule_names_roundtrip() {
        for r in Rule::ALL {
            assert_eq!(r.to_string().parse::<Rule>().unwrap(), r);
        }
        let json = serde_json::to_string(&Rule::R3).unwrap();
        assert_eq!(json, "\"R3\"");
    }
}
