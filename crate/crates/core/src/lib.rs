//! Mining and retrieval of triadic concepts.
//!
//! A [`TriadicContext`] is mined into a [`ConceptSet`]; an [`InvertedIndex`]
//! over the concepts' elements answers partial or complete triple queries,
//! which [`query::search`] ranks by similarity. [`baseline::BaselineEngine`]
//! answers the same queries through derivations on the dyadic projections.

pub mod baseline;
pub mod bench;
pub mod closure;
pub mod context;
pub mod dyadic;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod index;
pub mod miner;
pub mod query;
pub mod synth;
pub mod validate;

pub use context::{Dim, ElemId, ElementDictionary, TriadicContext};
pub use dyadic::DyadicContext;
pub use error::{Error, Result};
pub use index::InvertedIndex;
pub use miner::{factorize, mine_concepts, mine_concepts_bruteforce, ConceptId, ConceptSet, Rectangle, TriadicConcept};
pub use query::{search, MatchMode, Query, RankedHit, ToleranceScope};
