//! Linear networks over a prime field.
//!
//! The weight `a_ij` sits on edge `(v_i, v_j)` and the state evolves as
//! `x_j[k+1] = Σ_i a_ij x_i[k]`, so information flows along the edges in
//! the same direction as in the Boolean case. In matrix form the transition
//! matrix is the transpose of the weight matrix.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{parse_graph, GraphError, MarkedDigraph, Tokens};
use crate::matching::{hopcroft_karp, BipartiteGraph};
use crate::sog::{decompose_observed_paths, is_sog};

/// Largest network accepted by the rank test.
pub const MAX_FFN_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FfnError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("missing `prime <p>` line")]
    MissingPrime,
    #[error("line {line}: weight {w} is not below the modulus {p}")]
    WeightOutOfRange { line: usize, w: u64, p: u64 },
    #[error("line {line}: weight given for v{i} -> v{j}, which is not an edge")]
    NotAnEdge { line: usize, i: usize, j: usize },
    #[error("weight {w} is not below the modulus {p}")]
    Weight { w: u64, p: u64 },
    #[error("weight matrix is {rows}x{cols}, expected {n}x{n}")]
    Shape { rows: usize, cols: usize, n: usize },
    #[error("network has {0} nodes, the limit is {MAX_FFN_NODES}")]
    TooLarge(usize),
    #[error("no vertex is marked")]
    NoMarks,
}

impl FfnError {
    pub fn line(&self) -> Option<usize> {
        match self {
            FfnError::Graph(e) => e.line(),
            FfnError::WeightOutOfRange { line, .. } | FfnError::NotAnEdge { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Trial division; the moduli used here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d <= p / d {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<(), FfnError> {
    // below 2^31 so products and sums of two residues fit in a u64
    if p < 1 << 31 && is_prime(p) {
        Ok(())
    } else {
        Err(FfnError::NotPrime(p))
    }
}

/// Inverse of `a` modulo prime `p` by the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(p as i128) as u64)
}

/// Rank over F_p by Gaussian elimination, pivoting on the first nonzero row.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_inverse(m[rank][c], p).expect("nonzero element of a prime field");
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                let pivot = m[rank].clone();
                for (x, &y) in m[r][c..cols].iter_mut().zip(&pivot[c..cols]) {
                    *x = (*x + (p - f) * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteFieldNetwork {
    pub p: u64,
    /// Row-major weights; `weights[i - 1][j - 1]` is `a_ij`.
    pub weights: Vec<Vec<u64>>,
    pub marked: Vec<usize>,
}

impl FiniteFieldNetwork {
    pub fn new(p: u64, weights: Vec<Vec<u64>>, marked: Vec<usize>) -> Result<Self, FfnError> {
        check_prime(p)?;
        let n = weights.len();
        if let Some(row) = weights.iter().find(|r| r.len() != n) {
            return Err(FfnError::Shape {
                rows: n,
                cols: row.len(),
                n,
            });
        }
        if let Some(&w) = weights.iter().flatten().find(|&&w| w >= p) {
            return Err(FfnError::Weight { w, p });
        }
        let mut marked = marked;
        marked.sort_unstable();
        marked.dedup();
        if marked.iter().any(|&v| v == 0 || v > n) {
            return Err(FfnError::Graph(GraphError::OutOfRange {
                vertex: *marked.iter().find(|&&v| v == 0 || v > n).unwrap(),
                n,
                line: None,
            }));
        }
        Ok(FiniteFieldNetwork { p, weights, marked })
    }

    /// Weight 1 on every edge of `g`.
    pub fn indicator(g: &MarkedDigraph, p: u64) -> Result<Self, FfnError> {
        let mut w = vec![vec![0; g.n()]; g.n()];
        for (i, j) in g.edges() {
            w[i - 1][j - 1] = 1;
        }
        FiniteFieldNetwork::new(p, w, g.marked())
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i - 1][j - 1]
    }

    /// Digraph of the nonzero weights, with the same marks.
    pub fn support(&self) -> MarkedDigraph {
        let n = self.n();
        let edges = (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).filter(|&(i, j)| self.weight(i, j) != 0);
        MarkedDigraph::from_edges(n, edges, self.marked.iter().copied()).expect("indices within range")
    }

    /// Same zero pattern as `other`.
    pub fn pattern_equivalent(&self, other: &FiniteFieldNetwork) -> bool {
        self.n() == other.n()
            && self
                .weights
                .iter()
                .flatten()
                .zip(other.weights.iter().flatten())
                .all(|(&a, &b)| (a == 0) == (b == 0))
    }

    /// One step of `x_j ← Σ_i a_ij x_i`.
    pub fn step(&self, x: &[u64]) -> Vec<u64> {
        (0..self.n())
            .map(|j| (0..self.n()).fold(0, |acc, i| (acc + self.weights[i][j] * x[i]) % self.p))
            .collect()
    }

    pub fn output(&self, x: &[u64]) -> Vec<u64> {
        self.marked.iter().map(|&v| x[v - 1]).collect()
    }

    /// Rows `C, CM, …, CM^{n-1}` with `M` the transition matrix.
    pub fn observability_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.n();
        // Row for sensor s after k steps: e_s M^k, advanced by r ← r M.
        let mut current: Vec<Vec<u64>> = self
            .marked
            .iter()
            .map(|&v| (0..n).map(|c| u64::from(c == v - 1)).collect())
            .collect();
        let mut rows = Vec::with_capacity(n * current.len());
        for _ in 0..n {
            rows.extend(current.iter().cloned());
            // (r M)_c = Σ_j r_j M_jc = Σ_j r_j a_cj
            current = current
                .iter()
                .map(|r| {
                    (0..n)
                        .map(|c| (0..n).fold(0, |acc, j| (acc + r[j] * self.weights[c][j]) % self.p))
                        .collect()
                })
                .collect();
        }
        rows
    }
}

/// Whether the initial state is determined by the outputs.
pub fn observability_rank(net: &FiniteFieldNetwork) -> Result<bool, FfnError> {
    check_prime(net.p)?;
    if net.n() > MAX_FFN_NODES {
        return Err(FfnError::TooLarge(net.n()));
    }
    Ok(rank_mod_p(&net.observability_matrix(), net.p) == net.n())
}

/// Every network with nonzero weights exactly on the edges of `g` is
/// observable, certified by `g` being an SOG.
pub fn strongly_structural_check(g: &MarkedDigraph) -> bool {
    is_sog(g)
}

/// `g` plus one sink per marked vertex. The sinks carry the marks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxiliaryDigraph {
    pub graph: MarkedDigraph,
    /// `(marked vertex, its sink)` pairs.
    pub sinks: Vec<(usize, usize)>,
}

impl AuxiliaryDigraph {
    pub fn new(g: &MarkedDigraph) -> Self {
        let marked = g.marked();
        let n = g.n();
        let sinks: Vec<(usize, usize)> = marked.iter().enumerate().map(|(k, &v)| (v, n + 1 + k)).collect();
        let graph = MarkedDigraph::from_edges(
            n + sinks.len(),
            g.edges().chain(sinks.iter().copied()),
            sinks.iter().map(|&(_, s)| s),
        )
        .expect("sinks are numbered after the original vertices");
        AuxiliaryDigraph { graph, sinks }
    }

    /// Vertex-disjoint paths covering every vertex, from a maximum matching
    /// between out-copies and in-copies. A marked vertex may only continue
    /// into its own sink, so a path never passes a sensor. Minimum among such
    /// covers when the digraph is acyclic; `None` if the matching closes a
    /// cycle.
    pub fn matching_path_cover(&self) -> Option<Vec<Vec<usize>>> {
        let g = &self.graph;
        let n = g.n();
        let mut sink_of = vec![0; n + 1];
        for &(v, s) in &self.sinks {
            sink_of[v] = s;
        }
        let mut b = BipartiteGraph::new((1..=n).collect::<Vec<_>>(), (1..=n).collect::<Vec<_>>());
        for (i, j) in g.edges() {
            if i != j && (sink_of[i] == 0 || sink_of[i] == j) {
                b.add_edge(i - 1, j - 1);
            }
        }
        let mut next = vec![0usize; n + 1];
        let mut has_pred = vec![false; n + 1];
        for (l, r) in hopcroft_karp(&b).pairs {
            next[l + 1] = r + 1;
            has_pred[r + 1] = true;
        }
        let mut paths = Vec::new();
        let mut covered = 0;
        for head in (1..=n).filter(|&v| !has_pred[v]) {
            let mut path = vec![head];
            let mut v = head;
            while next[v] != 0 {
                v = next[v];
                path.push(v);
            }
            covered += path.len();
            paths.push(path);
        }
        (covered == n).then_some(paths)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FfnDesign {
    /// Weight 1 on the edges of `paths` (each ending at a marked vertex), 0 elsewhere.
    Designed {
        network: FiniteFieldNetwork,
        paths: Vec<Vec<usize>>,
    },
    NoCover,
}

/// An observable network supported on a subgraph of `g`.
pub fn design_observable_ffn(g: &MarkedDigraph, p: u64) -> Result<FfnDesign, FfnError> {
    check_prime(p)?;
    if g.marked_count() == 0 {
        return Err(FfnError::NoMarks);
    }
    let paths = match decompose_observed_paths(g) {
        Some(cover) => cover.paths,
        None => {
            let aux = AuxiliaryDigraph::new(g);
            let Some(cover) = aux.matching_path_cover() else {
                return Ok(FfnDesign::NoCover);
            };
            let is_sink = |v: usize| v > g.n();
            if cover.len() != aux.sinks.len() || !cover.iter().all(|p| p.len() >= 2 && is_sink(p[p.len() - 1])) {
                return Ok(FfnDesign::NoCover);
            }
            cover
                .into_iter()
                .map(|mut path| {
                    path.pop();
                    path
                })
                .collect()
        }
    };
    let mut w = vec![vec![0; g.n()]; g.n()];
    for path in &paths {
        for e in path.windows(2) {
            w[e[0] - 1][e[1] - 1] = 1;
        }
    }
    Ok(FfnDesign::Designed {
        network: FiniteFieldNetwork::new(p, w, g.marked())?,
        paths,
    })
}

/// A network file: a graph followed by `prime <p>` and optional
/// `weight <i> <j> <w>` lines. Edges without a weight line get weight 1.
pub fn parse_ffn(text: &str) -> Result<(MarkedDigraph, FiniteFieldNetwork), FfnError> {
    let mut graph_text = String::with_capacity(text.len());
    let mut prime = None;
    let mut weights = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Tokens::new(content, line);
        match tokens.next_word() {
            Some(("prime", col)) => {
                let p = tokens.integer()? as u64;
                tokens.finish()?;
                if prime.is_some() {
                    return Err(GraphError::Syntax {
                        line,
                        column: col,
                        message: "repeated `prime` line".into(),
                    }
                    .into());
                }
                check_prime(p)?;
                prime = Some(p);
                graph_text.push('\n');
            }
            Some(("weight", _)) => {
                let (i, j, w) = (tokens.integer()?, tokens.integer()?, tokens.integer()? as u64);
                tokens.finish()?;
                weights.push((line, i, j, w));
                graph_text.push('\n');
            }
            _ => {
                graph_text.push_str(raw);
                graph_text.push('\n');
            }
        }
    }
    let g = parse_graph(&graph_text)?;
    let p = prime.ok_or(FfnError::MissingPrime)?;
    let mut net = FiniteFieldNetwork::indicator(&g, p)?;
    for (line, i, j, w) in weights {
        if !g.has_edge(i, j) {
            return Err(FfnError::NotAnEdge { line, i, j });
        }
        if w >= p {
            return Err(FfnError::WeightOutOfRange { line, w, p });
        }
        net.weights[i - 1][j - 1] = w;
    }
    Ok((g, net))
}
