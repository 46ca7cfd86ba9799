//! Bundled example networks.

/// Three-node example graph with `x1` observed.
pub const TRIAD_GRAPH: &str = include_str!("../corpus/triad.graph");
/// 29-node T-LGL survival network with sensors on nodes 3, 5 and 6.
pub const TLGL29_BN: &str = include_str!("../corpus/tlgl29.bn");
pub const TLGL29_GRAPH: &str = include_str!("../corpus/tlgl29.graph");

/// Three-node example networks, keyed by the two operators in the rule for `x3`.
pub const TRIAD_BNS: [(&str, &str); 4] = [
    ("oror", include_str!("../corpus/triad_oror.bn")),
    ("orand", include_str!("../corpus/triad_orand.bn")),
    ("andor", include_str!("../corpus/triad_andor.bn")),
    ("andand", include_str!("../corpus/triad_andand.bn")),
];

/// Attractors of the T-LGL network listed as `x1..x29`, left to right.
pub const TLGL29_ATTRACTORS: [&str; 2] = [
    "11111111111001111000011101111",
    "11111111000000111000011100000",
];
