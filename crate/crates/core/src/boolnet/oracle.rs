use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::network::{BnError, BooleanNetwork, NodeFunction, MAX_ARITY};
use crate::graph::MarkedDigraph;

/// Largest network accepted by [`observability_bruteforce`].
pub const MAX_BRUTEFORCE_NODES: usize = 24;

const SAMPLE_BUDGET: usize = 10_000;

/// Exhaustive observability check: every pair of distinct initial states must
/// produce different outputs at some time.
///
/// Each pair is followed forward until its outputs differ, it reaches a pair
/// already known to separate, the two states merge, or the pair sequence
/// repeats. The last two mean the pair is never told apart.
pub fn observability_bruteforce(bn: &BooleanNetwork) -> Result<bool, BnError> {
    let n = bn.n();
    if n > MAX_BRUTEFORCE_NODES {
        return Err(BnError::TooLarge(n, MAX_BRUTEFORCE_NODES));
    }
    let size = 1u64 << n;
    let next: Vec<u32> = (0..size).map(|s| bn.step(s) as u32).collect();
    let out: Vec<u32> = (0..size).map(|s| bn.output(s) as u32).collect();
    let key = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };

    let mut separated: HashSet<(u32, u32)> = HashSet::new();
    let mut walk: Vec<(u32, u32)> = Vec::new();
    let mut on_walk: HashSet<(u32, u32)> = HashSet::new();
    for a in 0..size as u32 {
        for b in a + 1..size as u32 {
            if out[a as usize] != out[b as usize] || separated.contains(&(a, b)) {
                continue;
            }
            walk.clear();
            on_walk.clear();
            let (mut x, mut y) = (a, b);
            loop {
                if x == y {
                    return Ok(false);
                }
                let k = key(x, y);
                if out[x as usize] != out[y as usize] || separated.contains(&k) {
                    separated.extend(walk.iter().copied());
                    break;
                }
                if !on_walk.insert(k) {
                    return Ok(false);
                }
                walk.push(k);
                x = next[x as usize];
                y = next[y as usize];
            }
        }
    }
    Ok(true)
}

/// Every node computes the AND of its in-neighbors; in-degree-0 nodes are
/// constant 1.
pub fn conjunctive_bn(g: &MarkedDigraph) -> BooleanNetwork {
    conjunctive_bn_with_default(g, true)
}

/// As [`conjunctive_bn`], with a chosen constant for nodes without inputs.
pub fn conjunctive_bn_with_default(g: &MarkedDigraph, empty: bool) -> BooleanNetwork {
    let functions = g
        .vertices()
        .map(|v| {
            let inputs = g.ins(v).to_vec();
            if inputs.is_empty() {
                return NodeFunction::constant(empty);
            }
            let rows = 1usize << inputs.len();
            let mut table = vec![false; rows];
            table[rows - 1] = true;
            NodeFunction { inputs, table }
        })
        .collect();
    BooleanNetwork::new(functions, g.marked()).expect("AND of distinct inputs is minimal")
}

/// A random network whose dependency graph is exactly `g`: truth tables are
/// drawn uniformly and redrawn until every input is essential.
pub fn sample_consistent_bn(g: &MarkedDigraph, seed: u64) -> Result<BooleanNetwork, BnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut functions = Vec::with_capacity(g.n());
    for v in g.vertices() {
        let inputs = g.ins(v).to_vec();
        if inputs.len() > MAX_ARITY {
            return Err(BnError::Arity {
                node: v,
                arity: inputs.len(),
                limit: MAX_ARITY,
            });
        }
        let rows = 1usize << inputs.len();
        let mut f = None;
        for _ in 0..SAMPLE_BUDGET {
            let candidate = NodeFunction {
                inputs: inputs.clone(),
                table: (0..rows).map(|_| rng.gen::<bool>()).collect(),
            };
            if (0..inputs.len()).all(|b| candidate.is_essential(b)) {
                f = Some(candidate);
                break;
            }
        }
        functions.push(f.ok_or(BnError::RejectionBudget(v))?);
    }
    BooleanNetwork::new(functions, g.marked())
}
