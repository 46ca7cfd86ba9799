//! Seeded random instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::MarkedDigraph;

/// Generator for trial `trial` of an experiment seeded with `seed`. Each trial
/// gets its own stream, so results do not depend on evaluation order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Erdős–Rényi digraph: every ordered pair `(i, j)` with `i != j` is an edge
/// independently with probability `p`. No marks.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> MarkedDigraph {
    random_digraph(n, p, false, rng)
}

pub fn random_digraph<R: Rng>(n: usize, p: f64, self_loops: bool, rng: &mut R) -> MarkedDigraph {
    let mut g = MarkedDigraph::new(n).expect("n >= 1");
    let p = p.clamp(0.0, 1.0);
    for i in 1..=n {
        for j in 1..=n {
            if (i != j || self_loops) && rng.gen_bool(p) {
                g.add_edge(i, j).expect("fresh edge");
            }
        }
    }
    g
}

/// Marks each vertex independently with probability `fraction`, then forces at
/// least one mark when `nonempty` is set.
pub fn mark_randomly<R: Rng>(g: &mut MarkedDigraph, fraction: f64, nonempty: bool, rng: &mut R) {
    for v in 1..=g.n() {
        if rng.gen_bool(fraction.clamp(0.0, 1.0)) {
            g.mark(v).expect("in range");
        }
    }
    if nonempty && g.marked_count() == 0 {
        let v = rng.gen_range(1..=g.n());
        g.mark(v).expect("in range");
    }
}

/// Marks exactly `k` distinct vertices (or all of them if `k >= n`).
pub fn mark_k<R: Rng>(g: &mut MarkedDigraph, k: usize, rng: &mut R) {
    let mut vs: Vec<usize> = g.vertices().collect();
    vs.shuffle(rng);
    for &v in vs.iter().take(k) {
        g.mark(v).expect("in range");
    }
}

/// Random structurally observable graph. Vertices are split into observed
/// paths ending at marked vertices; additional edges only enter path heads,
/// which keeps every path edge a unique-in-neighbor edge. Every SOG on `n`
/// vertices can be produced this way.
pub fn random_sog<R: Rng>(n: usize, extra_edge_p: f64, rng: &mut R) -> MarkedDigraph {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut g = MarkedDigraph::new(n).expect("n >= 1");
    let mut heads = Vec::new();
    let mut start = 0;
    while start < n {
        let len = rng.gen_range(1..=n - start);
        let path = &order[start..start + len];
        for w in path.windows(2) {
            g.add_edge(w[0], w[1]).expect("fresh edge");
        }
        g.mark(path[len - 1]).expect("in range");
        heads.push(path[0]);
        start += len;
    }
    for &h in &heads {
        for u in 1..=n {
            if !g.has_edge(u, h) && rng.gen_bool(extra_edge_p.clamp(0.0, 1.0)) {
                g.add_edge(u, h).expect("fresh edge");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sog::is_sog;

    #[test]
    fn streams_are_reproducible() {
        let a = erdos_renyi(20, 0.2, &mut trial_rng(7, 3));
        let b = erdos_renyi(20, 0.2, &mut trial_rng(7, 3));
        let c = erdos_renyi(20, 0.2, &mut trial_rng(7, 4));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn erdos_renyi_extremes() {
        let mut rng = trial_rng(1, 0);
        assert_eq!(erdos_renyi(5, 0.0, &mut rng).edge_count(), 0);
        let full = erdos_renyi(5, 1.0, &mut rng);
        assert_eq!(full.edge_count(), 20);
        assert!((1..=5).all(|v| !full.has_edge(v, v)));
    }

    #[test]
    fn generated_sogs_are_sogs() {
        for t in 0..200 {
            let mut rng = trial_rng(11, t);
            let n = rng.gen_range(1..=10);
            assert!(is_sog(&random_sog(n, 0.3, &mut rng)));
        }
    }
}
