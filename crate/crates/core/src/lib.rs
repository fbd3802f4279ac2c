//! Direct-communication networks of collaborating editor groups.
//!
//! - [`wikitext`]: talk-page threads, signed posts and project member sets.
//! - [`network`]: per-project interaction graphs and member coverage.
//! - [`graph`]: weighted graphs and the determinism / degeneracy /
//!   effective-information metrics of their random walks.
//! - [`quality`]: FA/GA counts and the `Q_p` score family.
//! - [`stats`]: descriptives, correlation, OLS and F tests, and the three
//!   quality models.

pub mod graph;
pub mod network;
pub mod quality;
pub mod stats;
pub mod wikitext;

pub use graph::{GraphError, StructureMetrics, WeightedGraph};
