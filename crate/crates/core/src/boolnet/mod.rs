//! Boolean networks: expressions, truth-table dynamics and brute-force
//! observability oracles.

mod expr;
mod network;
mod oracle;

pub use expr::{Expr, ExprError};
pub use network::{
    bits_to_string, parse_bits, parse_bn, BnError, BooleanNetwork, NodeFunction, ParsedNetwork,
    StateTrajectory, MAX_ARITY, MAX_NODES,
};
pub use oracle::{
    conjunctive_bn, conjunctive_bn_with_default, observability_bruteforce, sample_consistent_bn,
    MAX_BRUTEFORCE_NODES,
};
