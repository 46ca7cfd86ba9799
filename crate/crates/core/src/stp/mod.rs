//! Semi-tensor-product algebra, pinning control design and observers for
//! pinned Boolean networks.

mod matrix;
mod observer;
mod pinning;

pub use matrix::{
    bool_index, canonical_bit, canonical_column, delete_factor, dummy, gcd, lcm, power_reducing,
    structure_matrix, structure_matrix_of, swap, DenseMatrix, LogicalMatrix,
};
pub use observer::{build_observer, estimate_initial_state, Estimate, Observer, ObserverError};
pub use pinning::{
    design_pinning, Operator, PinError, PinType, PinnedNode, PinningPlan, Polarity, MAX_PIN_INDEGREE,
};
