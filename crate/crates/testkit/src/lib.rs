//! Reference implementations the test suites compare the production code
//! against. Nothing here shares code with the crates under test: the oracles
//! are written for obviousness, not speed.

#![allow(clippy::needless_range_loop)]

pub mod gen;
pub mod gold;
pub mod graph;
pub mod prune;
