//! Marked interaction digraphs.
//!
//! Vertices are numbered `1..=n`. An edge `(i, j)` means that `x_i` feeds the
//! update of `x_j`. Self-loops are ordinary edges.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("vertex {vertex} out of range 1..={n}{}", at_line(*line))]
    OutOfRange {
        vertex: usize,
        n: usize,
        line: Option<usize>,
    },
    #[error("duplicate edge ({i}, {j}){}", at_line(*line))]
    DuplicateEdge {
        i: usize,
        j: usize,
        line: Option<usize>,
    },
    #[error("a digraph needs at least one vertex")]
    Empty,
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" on line {l}")).unwrap_or_default()
}

impl GraphError {
    /// Line number of the offending input, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            GraphError::Syntax { line, .. } => Some(*line),
            GraphError::OutOfRange { line, .. } | GraphError::DuplicateEdge { line, .. } => *line,
            GraphError::Empty => None,
        }
    }
}

/// A digraph on vertices `1..=n` with a set of marked (directly observed) vertices.
///
/// Adjacency lists are indexed by vertex number; slot 0 is unused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedDigraph {
    n: usize,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    marked: Vec<bool>,
}

impl MarkedDigraph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(MarkedDigraph {
            n,
            out_adj: vec![Vec::new(); n + 1],
            in_adj: vec![Vec::new(); n + 1],
            marked: vec![false; n + 1],
        })
    }

    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        marked: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GraphError> {
        let mut g = MarkedDigraph::new(n)?;
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        for v in marked {
            g.mark(v)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, v: usize) -> Result<(), GraphError> {
        if v == 0 || v > self.n {
            Err(GraphError::OutOfRange {
                vertex: v,
                n: self.n,
                line: None,
            })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<(), GraphError> {
        self.check(i)?;
        self.check(j)?;
        match self.out_adj[i].binary_search(&j) {
            Ok(_) => Err(GraphError::DuplicateEdge { i, j, line: None }),
            Err(pos) => {
                self.out_adj[i].insert(pos, j);
                let pos = self.in_adj[j].binary_search(&i).unwrap_err();
                self.in_adj[j].insert(pos, i);
                Ok(())
            }
        }
    }

    pub fn mark(&mut self, v: usize) -> Result<(), GraphError> {
        self.check(v)?;
        self.marked[v] = true;
        Ok(())
    }

    pub fn unmark(&mut self, v: usize) -> Result<(), GraphError> {
        self.check(v)?;
        self.marked[v] = false;
        Ok(())
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.marked.get(v).copied().unwrap_or(false)
    }

    /// Marked vertices in ascending order.
    pub fn marked(&self) -> Vec<usize> {
        self.vertices().filter(|&v| self.marked[v]).collect()
    }

    pub fn marked_count(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Edges in ascending `(i, j)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices()
            .flat_map(move |i| self.out_adj[i].iter().map(move |&j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i >= 1 && i <= self.n && self.out_adj[i].binary_search(&j).is_ok()
    }

    /// In-neighbors in ascending order.
    pub fn in_neighbors(&self, v: usize) -> Result<&[usize], GraphError> {
        self.check(v)?;
        Ok(&self.in_adj[v])
    }

    /// Out-neighbors in ascending order.
    pub fn out_neighbors(&self, v: usize) -> Result<&[usize], GraphError> {
        self.check(v)?;
        Ok(&self.out_adj[v])
    }

    // Unchecked accessors for the algorithms in this crate.
    pub(crate) fn ins(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub(crate) fn outs(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj.get(v).map_or(0, Vec::len)
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj.get(v).map_or(0, Vec::len)
    }

    /// The single in-neighbor of `v`, if `v` has in-degree exactly one.
    pub fn unique_in_neighbor(&self, v: usize) -> Option<usize> {
        match self.in_adj.get(v).map(Vec::as_slice) {
            Some([u]) => Some(*u),
            _ => None,
        }
    }

    /// Copy of the graph with the given vertices additionally marked.
    pub fn with_marks(&self, extra: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut g = self.clone();
        for v in extra {
            g.mark(v)?;
        }
        Ok(g)
    }

    /// Copy of the graph with no marked vertices.
    pub fn without_marks(&self) -> Self {
        let mut g = self.clone();
        g.marked.iter_mut().for_each(|m| *m = false);
        g
    }

    /// Replace the whole in-edge set of `v` with the single edge `(u, v)`.
    pub fn set_unique_in_neighbor(&mut self, v: usize, u: usize) -> Result<(), GraphError> {
        self.check(v)?;
        self.check(u)?;
        for w in std::mem::take(&mut self.in_adj[v]) {
            self.out_adj[w].retain(|&x| x != v);
        }
        self.add_edge(u, v)
    }

    /// Restore the in-edges of `v` from `original`.
    pub(crate) fn restore_in_edges(&mut self, v: usize, original: &MarkedDigraph) {
        for w in std::mem::take(&mut self.in_adj[v]) {
            self.out_adj[w].retain(|&x| x != v);
        }
        for &w in original.ins(v) {
            self.add_edge(w, v).expect("edge copied from a graph of the same size");
        }
    }

    pub fn adjacency_matrix(&self) -> AdjacencyMatrix {
        let mut entries = vec![vec![0u8; self.n]; self.n];
        for (i, j) in self.edges() {
            entries[i - 1][j - 1] = 1;
        }
        AdjacencyMatrix { entries }
    }

    /// Length of the shortest nonempty walk from `i` to `j`.
    pub fn distance(&self, i: usize, j: usize) -> Result<Option<usize>, GraphError> {
        self.distance_from_set(&[i], j)
    }

    /// Shortest nonempty walk from any member of `sources` to `j`.
    pub fn distance_from_set(&self, sources: &[usize], j: usize) -> Result<Option<usize>, GraphError> {
        self.check(j)?;
        for &s in sources {
            self.check(s)?;
        }
        let dist = self.bfs_nonempty(sources);
        Ok(dist[j])
    }

    /// Distances of nonempty shortest walks from a source set to every vertex.
    pub(crate) fn bfs_nonempty(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n + 1];
        let mut queue = VecDeque::new();
        for &s in sources {
            for &w in &self.out_adj[s] {
                if dist[w].is_none() {
                    dist[w] = Some(1);
                    queue.push_back(w);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &w in &self.out_adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// True when the digraph has no directed cycle (a self-loop counts as one).
    pub fn is_acyclic(&self) -> bool {
        let mut indeg: Vec<usize> = self.in_adj.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = self.vertices().filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &w in &self.out_adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        seen == self.n
    }

    /// Relabel so that the marked vertices become `1..=h` (both groups keep
    /// their relative order). Returns the new graph and `perm`, where
    /// `perm[old] = new` (slot 0 unused).
    pub fn relabel_canonical(&self) -> (MarkedDigraph, Vec<usize>) {
        let mut perm = vec![0; self.n + 1];
        let order = self
            .vertices()
            .filter(|&v| self.marked[v])
            .chain(self.vertices().filter(|&v| !self.marked[v]));
        for (new, old) in order.enumerate() {
            perm[old] = new + 1;
        }
        let g = MarkedDigraph::from_edges(
            self.n,
            self.edges().map(|(i, j)| (perm[i], perm[j])),
            self.marked().into_iter().map(|v| perm[v]),
        )
        .expect("permutation preserves validity");
        (g, perm)
    }

    /// Render in the line-oriented text format accepted by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut s = format!("digraph {}\n", self.n);
        let marked = self.marked();
        if !marked.is_empty() {
            s.push_str("marked");
            for v in marked {
                s.push_str(&format!(" {v}"));
            }
            s.push('\n');
        }
        for (i, j) in self.edges() {
            s.push_str(&format!("edge {i} {j}\n"));
        }
        s
    }

    /// Graphviz rendering. Marked vertices are drawn as double circles; each
    /// highlight fills its vertices with its colour (earlier highlights win).
    pub fn to_dot(&self, highlights: &[Highlight]) -> String {
        let mut s = String::from("digraph {\n");
        for v in self.vertices() {
            let mut attrs = vec![format!("label=\"v{v}\"")];
            if self.marked[v] {
                attrs.push("shape=doublecircle".into());
            } else {
                attrs.push("shape=circle".into());
            }
            if let Some(h) = highlights.iter().find(|h| h.vertices.contains(&v)) {
                attrs.push("style=filled".into());
                attrs.push(format!("fillcolor=\"{}\"", h.color));
                attrs.push(format!("tooltip=\"{}\"", h.name));
            }
            s.push_str(&format!("  v{v} [{}];\n", attrs.join(", ")));
        }
        for (i, j) in self.edges() {
            s.push_str(&format!("  v{i} -> v{j};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// A named vertex set drawn in a given colour by [`MarkedDigraph::to_dot`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Highlight {
    pub name: String,
    pub color: String,
    pub vertices: BTreeSet<usize>,
}

impl Highlight {
    pub fn new(name: &str, color: &str, vertices: impl IntoIterator<Item = usize>) -> Self {
        Highlight {
            name: name.to_string(),
            color: color.to_string(),
            vertices: vertices.into_iter().collect(),
        }
    }

    /// Simple vertices that are nobody's unique in-neighbor.
    pub fn p1_failures(vertices: impl IntoIterator<Item = usize>) -> Self {
        Highlight::new("p1_failure", "palegreen", vertices)
    }

    pub fn controlled(vertices: impl IntoIterator<Item = usize>) -> Self {
        Highlight::new("controlled", "lightskyblue", vertices)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    /// `entries[i-1][j-1] == 1` iff `(i, j)` is an edge.
    pub entries: Vec<Vec<u8>>,
}

impl AdjacencyMatrix {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i - 1][j - 1]
    }
}

/// Parse the line-oriented graph format:
///
/// ```text
/// digraph 3
/// marked 1
/// edge 2 1   # comments start with '#'
/// ```
pub fn parse_graph(text: &str) -> Result<MarkedDigraph, GraphError> {
    let mut g: Option<MarkedDigraph> = None;
    let mut seen_marked = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Tokens::new(content, line);
        let Some((keyword, kw_col)) = tokens.next_word() else {
            continue;
        };
        match (keyword, g.as_mut()) {
            ("digraph", None) => {
                let n = tokens.integer()?;
                tokens.finish()?;
                g = Some(MarkedDigraph::new(n).map_err(|_| GraphError::Syntax {
                    line,
                    column: kw_col,
                    message: "vertex count must be positive".into(),
                })?);
            }
            ("digraph", Some(_)) => return Err(syntax(line, kw_col, "repeated `digraph` header")),
            (_, None) => return Err(syntax(line, kw_col, "expected `digraph <n>` header first")),
            ("marked", Some(g)) => {
                if seen_marked {
                    return Err(syntax(line, kw_col, "repeated `marked` line"));
                }
                seen_marked = true;
                while let Some(v) = tokens.maybe_integer()? {
                    g.mark(v).map_err(|e| with_line(e, line))?;
                }
            }
            ("edge", Some(g)) => {
                let i = tokens.integer()?;
                let j = tokens.integer()?;
                tokens.finish()?;
                g.add_edge(i, j).map_err(|e| with_line(e, line))?;
            }
            (other, Some(_)) => {
                return Err(syntax(line, kw_col, &format!("unknown keyword `{other}`")))
            }
        }
    }
    g.ok_or_else(|| syntax(1, 1, "missing `digraph <n>` header"))
}

impl FromStr for MarkedDigraph {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

impl fmt::Display for MarkedDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn syntax(line: usize, column: usize, message: &str) -> GraphError {
    GraphError::Syntax {
        line,
        column,
        message: message.to_string(),
    }
}

pub(crate) fn with_line(e: GraphError, at: usize) -> GraphError {
    match e {
        GraphError::OutOfRange { vertex, n, .. } => GraphError::OutOfRange {
            vertex,
            n,
            line: Some(at),
        },
        GraphError::DuplicateEdge { i, j, .. } => GraphError::DuplicateEdge { i, j, line: Some(at) },
        other => other,
    }
}

/// Whitespace tokenizer that remembers 1-based columns.
pub(crate) struct Tokens<'a> {
    line: usize,
    rest: &'a str,
    offset: usize,
}

impl<'a> Tokens<'a> {
    pub(crate) fn new(text: &'a str, line: usize) -> Self {
        Tokens {
            line,
            rest: text,
            offset: 0,
        }
    }

    pub(crate) fn next_word(&mut self) -> Option<(&'a str, usize)> {
        let trimmed = self.rest.trim_start();
        self.offset += self.rest.len() - trimmed.len();
        if trimmed.is_empty() {
            self.rest = trimmed;
            return None;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let column = self.offset + 1;
        self.offset += end;
        self.rest = &trimmed[end..];
        Some((&trimmed[..end], column))
    }

    pub(crate) fn maybe_integer(&mut self) -> Result<Option<usize>, GraphError> {
        match self.next_word() {
            None => Ok(None),
            Some((w, column)) => w.parse::<usize>().map(Some).map_err(|_| GraphError::Syntax {
                line: self.line,
                column,
                message: format!("expected a non-negative integer, found `{w}`"),
            }),
        }
    }

    pub(crate) fn integer(&mut self) -> Result<usize, GraphError> {
        let column = self.offset + 1 + (self.rest.len() - self.rest.trim_start().len());
        self.maybe_integer()?.ok_or(GraphError::Syntax {
            line: self.line,
            column,
            message: "expected an integer".into(),
        })
    }

    pub(crate) fn finish(&mut self) -> Result<(), GraphError> {
        match self.next_word() {
            None => Ok(()),
            Some((w, column)) => Err(GraphError::Syntax {
                line: self.line,
                column,
                message: format!("unexpected trailing token `{w}`"),
            }),
        }
    }
}

/// JSON shape: `{"n": 3, "marked": [1], "edges": [[2, 1], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    marked: Vec<usize>,
    edges: Vec<[usize; 2]>,
}

impl Serialize for MarkedDigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n,
            marked: self.marked(),
            edges: self.edges().map(|(i, j)| [i, j]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedDigraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        MarkedDigraph::from_edges(raw.n, raw.edges.into_iter().map(|[i, j]| (i, j)), raw.marked)
            .map_err(serde::de::Error::custom)
    }
}
