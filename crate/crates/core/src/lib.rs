//! Concept-map construction from document collections.
//!
//! The pipeline runs corpus ingestion, rule-based triple extraction with
//! pronoun resolution, domination pruning of redundant triples, graph
//! materialization, and graph analytics. Each stage is usable on its own.

pub mod analytics;
pub mod corpus;
pub mod dominate;
pub mod error;
pub mod extract;
pub mod graphstore;
pub mod pipeline;
pub mod synth;
pub mod text;
pub mod triple;

pub use error::{Error, Result};
