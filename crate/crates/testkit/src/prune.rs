//! Domination by exhaustive pair checks.

/// A triple as the oracle sees it. `key` is (doc, sentence, index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleTriple {
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub key: (String, usize, usize),
}

pub type Key = (String, usize, usize);

/// Lowercase, single spaces, no punctuation at either end, no leading
/// articles (repeated until stable).
pub fn normalize(raw: &str) -> String {
    let mut s = raw
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ");
    loop {
        let trimmed = s.trim_matches(|c: char| !c.is_alphanumeric()).to_string();
        let words: Vec<&str> = trimmed.split(' ').filter(|w| !w.is_empty()).collect();
        let next = match words.first() {
            Some(w)
                if ["a", "an", "the"].contains(&w.trim_matches(|c: char| !c.is_alphanumeric())) =>
            {
                words[1..].join(" ")
            }
            _ => words.join(" "),
        };
        if next == s {
            return s;
        }
        s = next;
    }
}

struct Norm {
    s: String,
    r: String,
    o: String,
    key: Key,
    same_sentence: (String, usize),
}

fn score(field: &str) -> (usize, usize) {
    (field.split(' ').count(), field.chars().count())
}

/// Token-run containment.
pub fn contains_run(hay: &str, needle: &str) -> bool {
    let h: Vec<&str> = hay.split(' ').collect();
    let n: Vec<&str> = needle.split(' ').collect();
    (0..h.len()).any(|i| i + n.len() <= h.len() && h[i..i + n.len()] == n[..])
}

/// x beats y on a field: more information, or equal and an earlier key.
fn beats(x_field: &str, x_key: &Key, y_field: &str, y_key: &Key) -> bool {
    let (sx, sy) = (score(x_field), score(y_field));
    sx > sy || (sx == sy && x_key < y_key)
}

fn dominates(rule: usize, x: &Norm, y: &Norm) -> bool {
    match rule {
        0 => x.s == y.s && x.r == y.r && beats(&x.o, &x.key, &y.o, &y.key),
        1 => x.s == y.s && x.o == y.o && beats(&x.r, &x.key, &y.r, &y.key),
        2 => x.r == y.r && x.o == y.o && beats(&x.s, &x.key, &y.s, &y.key),
        _ => x.same_sentence == y.same_sentence && contains_run(&x.r, &y.o),
    }
}

fn prepare(triples: &[OracleTriple]) -> Vec<Norm> {
    let mut v: Vec<Norm> = triples
        .iter()
        .filter_map(|t| {
            let (s, r, o) = (
                normalize(&t.subject),
                normalize(&t.relation),
                normalize(&t.object),
            );
            (!s.is_empty() && !r.is_empty() && !o.is_empty()).then(|| Norm {
                s,
                r,
                o,
                key: t.key.clone(),
                same_sentence: (t.key.0.clone(), t.key.1),
            })
        })
        .collect();
    v.sort_by(|a, b| a.key.cmp(&b.key));
    v
}

fn survivors(items: &[Norm], alive: &[bool]) -> Vec<Key> {
    items
        .iter()
        .zip(alive)
        .filter(|(_, a)| **a)
        .map(|(n, _)| n.key.clone())
        .collect()
}

/// Rules in order, each repeated until no live pair qualifies, every pass
/// until a whole pass removes nothing. After every single removal the
/// search restarts from the smallest (dominator, dominated) key pair.
/// Cubic or worse; meant for small sets.
pub fn prune_pairwise(triples: &[OracleTriple]) -> Vec<Key> {
    let items = prepare(triples);
    let mut alive = vec![true; items.len()];
    loop {
        let mut removed_in_pass = false;
        for rule in 0..4 {
            'restart: loop {
                for x in 0..items.len() {
                    for y in 0..items.len() {
                        if x != y && alive[x] && alive[y] && dominates(rule, &items[x], &items[y]) {
                            alive[y] = false;
                            removed_in_pass = true;
                            continue 'restart;
                        }
                    }
                }
                break;
            }
        }
        if !removed_in_pass {
            return survivors(&items, &alive);
        }
    }
}

/// Same rules with one quadratic sweep per rule per pass. A sweep leaves no
/// qualifying live pair behind: liveness only shrinks, so a pair still live
/// at the end was live when the sweep visited it. Suitable for thousands of
/// triples.
pub fn prune_sweep(triples: &[OracleTriple]) -> Vec<Key> {
    let items = prepare(triples);
    let mut alive = vec![true; items.len()];
    loop {
        let mut removed_in_pass = false;
        for rule in 0..4 {
            for x in 0..items.len() {
                if !alive[x] {
                    continue;
                }
                for y in 0..items.len() {
                    if x != y && alive[y] && alive[x] && dominates(rule, &items[x], &items[y]) {
                        alive[y] = false;
                        removed_in_pass = true;
                    }
                }
            }
        }
        if !removed_in_pass {
            return survivors(&items, &alive);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, r: &str, o: &str, sent: usize) -> OracleTriple {
        OracleTriple {
            subject: s.into(),
            relation: r.into(),
            object: o.into(),
            key: ("d".into(), sent, 0),
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize("  The \"the\" Men. "), "men");
        assert_eq!(normalize("an"), "");
        assert_eq!(normalize("Spoke  To"), "spoke to");
    }

    #[test]
    fn nested_pair_collapses() {
        let input = [
            t("john", "traveled to", "eastern baghdad", 0),
            OracleTriple {
                key: ("d".into(), 0, 1),
                ..t("john", "traveled to eastern baghdad in", "january", 0)
            },
        ];
        assert_eq!(prune_pairwise(&input), [("d".to_string(), 0, 1)]);
        assert_eq!(prune_sweep(&input), prune_pairwise(&input));
    }
}
