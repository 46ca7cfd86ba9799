//! Structural observability of marked interaction digraphs, with minimum
//! repair plans and brute-force cross-checks on Boolean and finite-field
//! dynamics.

pub mod boolnet;
pub mod corpus;
pub mod ffn;
pub mod graph;
pub mod matching;
pub mod random;
pub mod realize;
pub mod sog;
pub mod stp;

pub use graph::{parse_graph, GraphError, Highlight, MarkedDigraph};
pub use sog::{analyze, check_properties, critical_sensors, decompose_observed_paths, is_sog};
