//! Maximum bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

/// Bipartite graph with labelled sides. Edges are stored as adjacency from
/// left indices to right indices, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph<L, R> {
    pub left: Vec<L>,
    pub right: Vec<R>,
    adj: Vec<Vec<usize>>,
}

impl<L, R> BipartiteGraph<L, R> {
    pub fn new(left: Vec<L>, right: Vec<R>) -> Self {
        let adj = vec![Vec::new(); left.len()];
        BipartiteGraph { left, right, adj }
    }

    /// Add edge between left index `l` and right index `r`. Repeated edges are ignored.
    pub fn add_edge(&mut self, l: usize, r: usize) {
        assert!(l < self.left.len() && r < self.right.len(), "edge endpoint out of range");
        if let Err(pos) = self.adj[l].binary_search(&r) {
            self.adj[l].insert(pos, r);
        }
    }

    pub fn neighbors(&self, l: usize) -> &[usize] {
        &self.adj[l]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(l, rs)| rs.iter().map(move |&r| (l, r)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// A set of `(left index, right index)` pairs, sorted by left index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True when every pair is an edge of `b` and no endpoint repeats.
    pub fn is_valid_for<L, R>(&self, b: &BipartiteGraph<L, R>) -> bool {
        let mut used_l = vec![false; b.left.len()];
        let mut used_r = vec![false; b.right.len()];
        self.pairs.iter().all(|&(l, r)| {
            let ok = l < used_l.len()
                && r < used_r.len()
                && !used_l[l]
                && !used_r[r]
                && b.neighbors(l).binary_search(&r).is_ok();
            if ok {
                used_l[l] = true;
                used_r[r] = true;
            }
            ok
        })
    }
}

const INF: usize = usize::MAX;

pub fn hopcroft_karp<L, R>(b: &BipartiteGraph<L, R>) -> Matching {
    let nl = b.left.len();
    let nr = b.right.len();
    let mut match_l: Vec<Option<usize>> = vec![None; nl];
    let mut match_r: Vec<Option<usize>> = vec![None; nr];
    let mut dist = vec![INF; nl];

    loop {
        // BFS from free left vertices builds the layered graph.
        let mut queue = VecDeque::new();
        for l in 0..nl {
            if match_l[l].is_none() {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = INF;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &b.adj[l] {
                match match_r[r] {
                    None => found = true,
                    Some(l2) if dist[l2] == INF => {
                        dist[l2] = dist[l] + 1;
                        queue.push_back(l2);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        // Vertex-disjoint shortest augmenting paths by DFS along the layers.
        let mut next_edge = vec![0usize; nl];
        for l in 0..nl {
            if match_l[l].is_none() {
                augment(b, l, &mut match_l, &mut match_r, &mut dist, &mut next_edge);
            }
        }
    }

    Matching {
        pairs: match_l
            .iter()
            .enumerate()
            .filter_map(|(l, r)| r.map(|r| (l, r)))
            .collect(),
    }
}

fn augment<L, R>(
    b: &BipartiteGraph<L, R>,
    start: usize,
    match_l: &mut [Option<usize>],
    match_r: &mut [Option<usize>],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    // Iterative DFS; `stack` holds left vertices on the current alternating path.
    let mut stack = vec![start];
    while let Some(&l) = stack.last() {
        if next_edge[l] == b.adj[l].len() {
            dist[l] = INF;
            stack.pop();
            continue;
        }
        let r = b.adj[l][next_edge[l]];
        next_edge[l] += 1;
        match match_r[r] {
            None => {
                // Flip the path: each left vertex takes the right vertex it
                // advanced through, which is the edge just before its cursor.
                let mut r = r;
                while let Some(l) = stack.pop() {
                    let prev = match_l[l];
                    match_l[l] = Some(r);
                    match_r[r] = Some(l);
                    match prev {
                        Some(p) => r = p,
                        None => break,
                    }
                }
                return true;
            }
            Some(l2) if dist[l2] == dist[l].wrapping_add(1) && dist[l] != INF => stack.push(l2),
            Some(_) => {}
        }
    }
    false
}
