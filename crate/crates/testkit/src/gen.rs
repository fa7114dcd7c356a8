//! Seeded random inputs dense in collisions, so every rule fires often.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::prune::OracleTriple;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const SUBJECTS: &[&str] = &[
    "john",
    "The men",
    "men",
    "the second squad",
    "squad",
    "Omar Farouk",
    "omar",
    "a cell",
];
const RELATIONS: &[&str] = &[
    "met",
    "met with",
    "spoke to",
    "spoke quietly to",
    "traveled to",
    "traveled to baghdad in",
    "met omar in",
    "paid",
    "paid the men for",
    "entered",
];
const OBJECTS: &[&str] = &[
    "baghdad",
    "eastern baghdad",
    "The men",
    "leader",
    "their leader",
    "january",
    "omar",
    "the bunker",
    "Bunker.",
    "squad",
];

/// Up to `max_len` triples over a few documents and sentences. Keys are unique.
pub fn triple_set(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<OracleTriple> {
    let len = rng.gen_range(0..=max_len);
    let mut keys: Vec<(String, usize, usize)> = Vec::with_capacity(len);
    while keys.len() < len {
        let key = (
            format!("d{}", rng.gen_range(0..3)),
            rng.gen_range(0..3),
            rng.gen_range(0..6),
        );
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|key| OracleTriple {
            subject: SUBJECTS.choose(rng).unwrap().to_string(),
            relation: RELATIONS.choose(rng).unwrap().to_string(),
            object: OBJECTS.choose(rng).unwrap().to_string(),
            key,
        })
        .collect()
}

/// A random multigraph: 1..=max_nodes nodes, edges may repeat or loop.
pub fn graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(1..=max_nodes);
    let density = rng.gen_range(0.0..0.5);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density / 2.0) {
                edges.push((a, b));
            }
        }
    }
    if n > 1 && rng.gen_bool(0.3) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        edges.push((a, b));
        edges.push((a, b));
    }
    (n, edges)
}

/// A seeded permutation of `items`.
pub fn shuffled<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut out = items.to_vec();
    out.shuffle(&mut rng(seed));
    out
}
