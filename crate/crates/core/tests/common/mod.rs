#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use sog_core::realize::apply_assignment;
use sog_core::{is_sog, MarkedDigraph};

/// Arbitrary marked digraph on `1..=max_n` vertices, self-loops included.
pub fn arb_graph(max_n: usize) -> impl Strategy<Value = MarkedDigraph> {
    (1..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec(proptest::bool::weighted(0.3), n * n),
            proptest::collection::vec(proptest::bool::weighted(0.3), n),
        )
            .prop_map(|(n, adj, marks)| {
                let edges = (0..n * n).filter(|&k| adj[k]).map(|k| (k / n + 1, k % n + 1));
                let marked = (0..n).filter(|&v| marks[v]).map(|v| v + 1);
                MarkedDigraph::from_edges(n, edges, marked).unwrap()
            })
    })
}

/// Every `k`-subset of `1..=n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Smallest number of controlled vertices (any subset, any new in-neighbor
/// including the vertex itself) that yields an SOG, searching sizes below
/// `limit`. `None` if nothing smaller than `limit` works.
pub fn brute_force_min_control(g: &MarkedDigraph, limit: usize) -> Option<usize> {
    let n = g.n();
    for k in 0..limit.min(n + 1) {
        for s in subsets(n, k) {
            let mut choice = vec![1usize; k];
            loop {
                let assignment: BTreeMap<usize, usize> =
                    s.iter().copied().zip(choice.iter().copied()).collect();
                if is_sog(&apply_assignment(g, &assignment)) {
                    return Some(k);
                }
                // odometer over V^k
                let mut i = 0;
                while i < k && choice[i] == n {
                    choice[i] = 1;
                    i += 1;
                }
                if i == k {
                    break;
                }
                choice[i] += 1;
            }
        }
    }
    None
}

/// Smallest number of extra marks that yields an SOG.
pub fn brute_force_min_marks(g: &MarkedDigraph) -> usize {
    let n = g.n();
    for k in 0..=n {
        for s in subsets(n, k) {
            if is_sog(&g.with_marks(s).unwrap()) {
                return k;
            }
        }
    }
    unreachable!("marking every vertex always works")
}

/// Every network over F_p whose nonzero weights are exactly the edges of `g`,
/// passed to `visit` until it returns `false`. Returns whether the walk finished.
pub fn for_each_weighting(
    g: &MarkedDigraph,
    p: u64,
    mut visit: impl FnMut(&sog_core::ffn::FiniteFieldNetwork) -> bool,
) -> bool {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut net = sog_core::ffn::FiniteFieldNetwork::indicator(g, p).unwrap();
    loop {
        if !visit(&net) {
            return false;
        }
        // odometer over {1..p-1}^|E|
        let mut k = 0;
        while k < edges.len() && net.weights[edges[k].0 - 1][edges[k].1 - 1] == p - 1 {
            net.weights[edges[k].0 - 1][edges[k].1 - 1] = 1;
            k += 1;
        }
        if k == edges.len() {
            return true;
        }
        net.weights[edges[k].0 - 1][edges[k].1 - 1] += 1;
    }
}

/// Observability by simulation: the first `n` outputs must differ for every
/// pair of distinct initial states over F_p.
pub fn ffn_observable_by_enumeration(net: &sog_core::ffn::FiniteFieldNetwork) -> bool {
    let n = net.n();
    let total = (net.p as usize).pow(n as u32);
    let mut seen = std::collections::HashSet::with_capacity(total);
    for code in 0..total {
        let mut x: Vec<u64> = (0..n).map(|i| (code / (net.p as usize).pow(i as u32) % net.p as usize) as u64).collect();
        let mut ys = Vec::with_capacity(n * net.marked.len());
        for _ in 0..n {
            ys.extend(net.output(&x));
            x = net.step(&x);
        }
        if !seen.insert(ys) {
            return false;
        }
    }
    true
}

/// Some weighting of `g` over F_p that the rank test rejects.
pub fn unobservable_witness(g: &MarkedDigraph, p: u64) -> Option<sog_core::ffn::FiniteFieldNetwork> {
    let mut found = None;
    for_each_weighting(g, p, |net| {
        if sog_core::ffn::observability_rank(net).unwrap() {
            true
        } else {
            found = Some(net.clone());
            false
        }
    });
    found
}
