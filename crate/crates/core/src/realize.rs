//! Minimum realizations of structurally observable graphs.
//!
//! Two ways to repair a graph: mark extra vertices ([`solve_problem1`]) or
//! control vertices, i.e. replace a vertex's in-edges with a single chosen
//! in-neighbor ([`solve_problem2`]). Both optimal costs equal the number of
//! P1 failures plus the number of closed all-simple forest cycles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::MarkedDigraph;
use crate::matching::{hopcroft_karp, BipartiteGraph};
use crate::random::{erdos_renyi, mark_k, trial_rng};
use crate::sog::{check_properties, is_sog, sensor_failure_conditions, Forest};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("no marked vertex: no amount of control makes the graph observable")]
    NoMarkedVertex,
    #[error("graph has a directed cycle")]
    Cyclic,
    #[error("post-check failed: {0}")]
    PostCheck(String),
}

/// Vertices to mark in addition to the existing marks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarkPlan {
    pub added_marks: Vec<usize>,
}

/// Every P1 failure, plus the lowest vertex of each closed all-simple cycle.
pub fn solve_problem1(g: &MarkedDigraph) -> MarkPlan {
    let report = check_properties(g);
    let mut marks: BTreeSet<usize> = report.p1_failures.into_iter().collect();
    marks.extend(report.p2_failures.iter().map(|c| c[0]));
    MarkPlan {
        added_marks: marks.into_iter().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MSets {
    /// Simple vertices failing P1.
    pub m_bar: Vec<usize>,
    /// Members of `m_bar` with out-degree zero.
    pub m_bar_1: Vec<usize>,
    pub m_bar_2: Vec<usize>,
    /// Vertices at distance exactly one from `m_bar`.
    pub nabla1: Vec<usize>,
}

pub fn compute_m_sets(g: &MarkedDigraph) -> MSets {
    let m_bar = check_properties(g).p1_failures;
    let (m_bar_1, m_bar_2) = m_bar.iter().partition(|&&v| g.out_degree(v) == 0);
    let nabla1: BTreeSet<usize> = m_bar.iter().flat_map(|&v| g.outs(v).iter().copied()).collect();
    MSets {
        m_bar,
        m_bar_1,
        m_bar_2,
        nabla1: nabla1.into_iter().collect(),
    }
}

/// Right-hand vertex of the bipartite graph: an original vertex, or the
/// duplicate of a vertex that also sits on the left side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RightVertex {
    Original(usize),
    Duplicate(usize),
}

impl RightVertex {
    pub fn vertex(self) -> usize {
        match self {
            RightVertex::Original(v) | RightVertex::Duplicate(v) => v,
        }
    }
}

/// Left side: `m_bar`. Right side: out-neighbors of `m_bar`, with members of
/// `m_bar` itself appearing as duplicates. Self-pairs are left out.
pub fn build_bipartite(g: &MarkedDigraph, s: &MSets) -> BipartiteGraph<usize, RightVertex> {
    let in_m_bar = membership(g.n(), &s.m_bar);
    let mut right: Vec<RightVertex> = s
        .nabla1
        .iter()
        .filter(|&&v| !in_m_bar[v])
        .map(|&v| RightVertex::Original(v))
        .collect();
    right.extend(
        s.nabla1
            .iter()
            .filter(|&&v| in_m_bar[v])
            .map(|&v| RightVertex::Duplicate(v)),
    );
    let index: BTreeMap<RightVertex, usize> = right.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut b = BipartiteGraph::new(s.m_bar.clone(), right);
    for (l, &u) in s.m_bar.iter().enumerate() {
        for &w in g.outs(u) {
            if w == u {
                continue;
            }
            let r = if in_m_bar[w] {
                RightVertex::Duplicate(w)
            } else {
                RightVertex::Original(w)
            };
            b.add_edge(l, index[&r]);
        }
    }
    b
}

/// Forest cycles split by whether they satisfy P2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SSets {
    pub all: Vec<Vec<usize>>,
    /// Cycles carrying a mark or with a vertex hanging off them.
    pub satisfied: Vec<Vec<usize>>,
    /// Closed all-simple cycles.
    pub violated: Vec<Vec<usize>>,
}

pub fn compute_s_sets(g: &MarkedDigraph) -> SSets {
    let report = check_properties(g);
    let satisfied = report
        .op_ccs
        .iter()
        .filter(|c| !report.p2_failures.contains(c))
        .cloned()
        .collect();
    SSets {
        all: report.op_ccs,
        satisfied,
        violated: report.p2_failures,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NStar {
    Finite(usize),
    Infinite,
}

impl NStar {
    pub fn finite(self) -> Option<usize> {
        match self {
            NStar::Finite(k) => Some(k),
            NStar::Infinite => None,
        }
    }
}

impl Serialize for NStar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            NStar::Finite(k) => s.serialize_u64(*k as u64),
            NStar::Infinite => s.serialize_str("infinite"),
        }
    }
}

/// Minimum number of controlled vertices that turns `g` into an SOG.
pub fn n_star(g: &MarkedDigraph) -> NStar {
    if g.marked_count() == 0 {
        return NStar::Infinite;
    }
    let r = check_properties(g);
    NStar::Finite(r.p1_failures.len() + r.p2_failures.len())
}

/// Controlled vertices with their new unique in-neighbors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlPlan {
    pub controlled: Vec<usize>,
    /// Controlled vertex → its new unique in-neighbor.
    #[serde(serialize_with = "string_keys")]
    pub assignment: BTreeMap<usize, usize>,
    pub n_star: usize,
    #[serde(skip)]
    pub result: MarkedDigraph,
}

fn string_keys<S: Serializer>(map: &BTreeMap<usize, usize>, s: S) -> Result<S::Ok, S::Error> {
    // JSON object keys must be strings; keep numeric order rather than lexical.
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        m.serialize_entry(&k.to_string(), v)?;
    }
    m.end()
}

impl ControlPlan {
    /// Plan for a given assignment; no minimality or validity check.
    pub fn from_assignment(g: &MarkedDigraph, assignment: BTreeMap<usize, usize>) -> Self {
        let result = apply_assignment(g, &assignment);
        ControlPlan {
            controlled: assignment.keys().copied().collect(),
            n_star: assignment.len(),
            assignment,
            result,
        }
    }

    /// The same assignment keyed by the new in-neighbor: each vertex mapped to
    /// the controlled vertices it now drives.
    pub fn by_driver(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&w, &u) in &self.assignment {
            m.entry(u).or_default().push(w);
        }
        m
    }
}

/// Copy of `g` where every controlled vertex keeps only its assigned in-edge.
pub fn apply_assignment(g: &MarkedDigraph, assignment: &BTreeMap<usize, usize>) -> MarkedDigraph {
    let mut h = g.clone();
    for (&w, &u) in assignment {
        h.set_unique_in_neighbor(w, u).expect("assignment within range");
    }
    h
}

fn membership(n: usize, vs: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n + 1];
    for &v in vs {
        m[v] = true;
    }
    m
}

/// Successor choice for a path decomposition of the forest. Each simple
/// vertex with children picks one: the child nearest a marked vertex if any
/// child reaches one, else a child off its own cycle, else any child. The
/// chosen child always has the chooser as its unique in-neighbor.
pub(crate) fn successors(g: &MarkedDigraph) -> Vec<Option<usize>> {
    let n = g.n();
    let forest = Forest::of(g);
    let mut dist: Vec<Option<usize>> = vec![None; n + 1];
    let mut queue = std::collections::VecDeque::new();
    for m in g.marked() {
        dist[m] = Some(0);
        queue.push_back(m);
    }
    while let Some(x) = queue.pop_front() {
        if let Some(p) = forest.parent[x] {
            if !g.is_marked(p) && dist[p].is_none() {
                dist[p] = dist[x].map(|d| d + 1);
                queue.push_back(p);
            }
        }
    }
    let mut cycle_of = vec![usize::MAX; n + 1];
    for (id, c) in forest.cycles().iter().enumerate() {
        for &v in c {
            cycle_of[v] = id;
        }
    }
    let mut succ = vec![None; n + 1];
    for v in g.vertices().filter(|&v| !g.is_marked(v)) {
        let kids = &forest.children[v];
        succ[v] = kids
            .iter()
            .filter_map(|&c| dist[c].map(|d| (d, c)))
            .min()
            .map(|(_, c)| c)
            .or_else(|| {
                (cycle_of[v] != usize::MAX)
                    .then(|| kids.iter().copied().find(|&c| cycle_of[c] != cycle_of[v]))
                    .flatten()
            })
            .or_else(|| kids.first().copied());
    }
    succ
}

/// Chains of a successor relation, and its cycles.
pub(crate) struct Chains {
    /// Each chain from head to tail.
    pub paths: Vec<Vec<usize>>,
    /// Each cycle starting at its lowest vertex, in successor order.
    pub cycles: Vec<Vec<usize>>,
}

pub(crate) fn chains(n: usize, succ: &[Option<usize>]) -> Chains {
    let mut is_succ = vec![false; n + 1];
    for s in succ.iter().flatten() {
        is_succ[*s] = true;
    }
    let mut seen = vec![false; n + 1];
    let mut paths = Vec::new();
    for h in (1..=n).filter(|&v| !is_succ[v]) {
        let mut path = vec![h];
        seen[h] = true;
        let mut v = h;
        while let Some(s) = succ[v] {
            seen[s] = true;
            path.push(s);
            v = s;
        }
        paths.push(path);
    }
    let mut cycles = Vec::new();
    for start in 1..=n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut v = succ[start].expect("vertex on a successor cycle");
        while v != start {
            seen[v] = true;
            cycle.push(v);
            v = succ[v].expect("vertex on a successor cycle");
        }
        cycles.push(cycle);
    }
    Chains { paths, cycles }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PathType {
    #[serde(rename = "I.1")]
    I1,
    #[serde(rename = "I.2")]
    I2,
    #[serde(rename = "I.3")]
    I3,
    #[serde(rename = "II.1")]
    II1,
    #[serde(rename = "II.2")]
    II2,
    #[serde(rename = "II.3")]
    II3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CycleType {
    I,
    II,
}

/// A chain in which each vertex is the unique in-neighbor of the next.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpPath {
    pub vertices: Vec<usize>,
    pub kind: PathType,
    /// Last vertex on the chain with two or more forest children.
    pub backtracking: Option<usize>,
}

impl OpPath {
    pub fn head(&self) -> usize {
        self.vertices[0]
    }

    pub fn tail(&self) -> usize {
        *self.vertices.last().expect("nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpCycle {
    pub vertices: Vec<usize>,
    pub kind: CycleType,
}

/// Vertex-disjoint chains and closed cycles spanning a graph. Chains ending at
/// a marked vertex are type I, the rest type II; the suffix records whether a
/// backtracking vertex exists (.1 when not) and, if so, whether a controlled
/// vertex lies after it (.3) or not (.2). Cycles containing a controlled
/// vertex are type II.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDecomposition {
    pub paths: Vec<OpPath>,
    pub cycles: Vec<OpCycle>,
}

impl ComponentDecomposition {
    pub fn paths_of(&self, kind: PathType) -> impl Iterator<Item = &OpPath> {
        self.paths.iter().filter(move |p| p.kind == kind)
    }

    pub fn cycles_of(&self, kind: CycleType) -> impl Iterator<Item = &OpCycle> {
        self.cycles.iter().filter(move |c| c.kind == kind)
    }
}

pub fn decompose_components(g: &MarkedDigraph, controlled: &BTreeSet<usize>) -> ComponentDecomposition {
    let forest = Forest::of(g);
    let ch = chains(g.n(), &successors(g));
    let paths = ch
        .paths
        .into_iter()
        .map(|vertices| {
            let typed_one = g.is_marked(*vertices.last().expect("nonempty"));
            let bt_pos = vertices.iter().rposition(|&v| forest.children[v].len() >= 2);
            let kind = match (typed_one, bt_pos) {
                (true, None) => PathType::I1,
                (false, None) => PathType::II1,
                (t, Some(i)) => {
                    let after = vertices[i + 1..].iter().any(|v| controlled.contains(v));
                    match (t, after) {
                        (true, false) => PathType::I2,
                        (true, true) => PathType::I3,
                        (false, false) => PathType::II2,
                        (false, true) => PathType::II3,
                    }
                }
            };
            OpPath {
                backtracking: bt_pos.map(|i| vertices[i]),
                vertices,
                kind,
            }
        })
        .collect();
    let cycles = ch
        .cycles
        .into_iter()
        .map(|vertices| OpCycle {
            kind: if vertices.iter().any(|v| controlled.contains(v)) {
                CycleType::II
            } else {
                CycleType::I
            },
            vertices,
        })
        .collect();
    ComponentDecomposition { paths, cycles }
}

/// First step of the general construction: every P1 failure gets one distinct
/// controlled vertex below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstStep {
    /// Controlled vertex → its new unique in-neighbor (a member of `m_bar`).
    pub assignment: BTreeMap<usize, usize>,
    pub graph: MarkedDigraph,
    succ: Vec<Option<usize>>,
}

impl FirstStep {
    pub fn controlled(&self) -> BTreeSet<usize> {
        self.assignment.keys().copied().collect()
    }

    pub fn components(&self) -> ComponentDecomposition {
        decompose_components(&self.graph, &self.controlled())
    }
}

/// For each P1 failure `u` in ascending order, control the lowest-index chain
/// head that is not yet controlled and is not `u` itself, hanging it below
/// `u`. Chain heads are nobody's chosen successor, so moving them never
/// breaks another chain.
pub fn first_step(g: &MarkedDigraph) -> Result<FirstStep, RealizeError> {
    if g.marked_count() == 0 {
        return Err(RealizeError::NoMarkedVertex);
    }
    let mut succ = successors(g);
    let ch = chains(g.n(), &succ);
    let mut pool: BTreeSet<usize> = ch.paths.iter().map(|p| p[0]).collect();
    let mut assignment = BTreeMap::new();
    for u in check_properties(g).p1_failures {
        // Each mark and each failure ends its own chain, so the pool always
        // holds at least two candidates here.
        let w = *pool
            .iter()
            .find(|&&w| w != u)
            .ok_or_else(|| RealizeError::PostCheck("ran out of chain heads".into()))?;
        pool.remove(&w);
        assignment.insert(w, u);
        succ[u] = Some(w);
    }
    Ok(FirstStep {
        graph: apply_assignment(g, &assignment),
        assignment,
        succ,
    })
}

/// Minimum control plan for any graph with at least one mark.
///
/// Acyclic inputs with more than `sqrt(n) + 1` edges take the matching route;
/// everything else goes through [`solve_problem2_general`].
pub fn solve_problem2(g: &MarkedDigraph) -> Result<ControlPlan, RealizeError> {
    let dense = g.edge_count() as f64 > (g.n() as f64).sqrt() + 1.0;
    if dense && g.marked_count() > 0 && g.is_acyclic() {
        solve_problem2_acyclic(g)
    } else {
        solve_problem2_general(g)
    }
}

/// Two-step construction. After [`first_step`] every simple vertex has a
/// successor, and the successor relation splits into chains ending at marks
/// and closed cycles. Each closed cycle is then opened onto a chain that
/// reaches a mark: a cycle containing a controlled vertex is opened by moving
/// that control (no extra cost), an untouched cycle by one new control.
pub fn solve_problem2_general(g: &MarkedDigraph) -> Result<ControlPlan, RealizeError> {
    let FirstStep {
        mut assignment,
        mut graph,
        mut succ,
    } = first_step(g)?;

    let cycles = chains(g.n(), &succ).cycles;
    for cycle in cycles {
        let ch = chains(g.n(), &succ);
        // A chain reaching a mark; its head is never a controlled vertex
        // because every controlled vertex is its driver's successor.
        let head = ch
            .paths
            .iter()
            .filter(|p| g.is_marked(*p.last().expect("nonempty")))
            .map(|p| p[0])
            .min()
            .ok_or_else(|| RealizeError::PostCheck("no chain reaches a mark".into()))?;
        let driver = match cycle.iter().copied().filter(|v| assignment.contains_key(v)).min() {
            Some(h) => {
                let u = assignment.remove(&h).expect("controlled");
                graph.restore_in_edges(h, g);
                u
            }
            None => cycle[0],
        };
        assignment.insert(head, driver);
        graph
            .set_unique_in_neighbor(head, driver)
            .expect("vertices in range");
        succ[driver] = Some(head);
    }

    let plan = ControlPlan::from_assignment(g, assignment);
    debug_assert_eq!(plan.result, graph);
    post_check(g, plan)
}

/// Matching route for acyclic graphs. Out-neighbors of P1 failures have
/// in-degree at least two, so controlling them costs nobody a child; a maximum
/// matching pairs as many failures as possible with such vertices, and the
/// chains still ending at unmatched failures are then strung together in
/// front of a chain that reaches a mark.
pub fn solve_problem2_acyclic(g: &MarkedDigraph) -> Result<ControlPlan, RealizeError> {
    if g.marked_count() == 0 {
        return Err(RealizeError::NoMarkedVertex);
    }
    if !g.is_acyclic() {
        return Err(RealizeError::Cyclic);
    }
    let s = compute_m_sets(g);
    let b = build_bipartite(g, &s);
    let matching = hopcroft_karp(&b);
    let mut assignment = BTreeMap::new();
    for &(l, r) in &matching.pairs {
        assignment.insert(b.right[r].vertex(), b.left[l]);
    }
    let matched = apply_assignment(g, &assignment);

    let ch = chains(g.n(), &successors(&matched));
    let (mut good, mut open): (Vec<Vec<usize>>, Vec<Vec<usize>>) = ch
        .paths
        .into_iter()
        .partition(|p| g.is_marked(*p.last().expect("nonempty")));
    if !ch.cycles.is_empty() {
        return Err(RealizeError::PostCheck("cycle after matching on an acyclic graph".into()));
    }
    open.sort_by_key(|p| *p.last().expect("nonempty"));
    good.sort();
    let target = good
        .first()
        .map(|p| p[0])
        .ok_or_else(|| RealizeError::PostCheck("no chain reaches a mark".into()))?;
    // open[0] -> open[1] -> ... -> open[last] -> target chain
    let heads = open.iter().skip(1).map(|p| p[0]).chain(std::iter::once(target));
    for (p, next_head) in open.iter().zip(heads) {
        assignment.insert(next_head, *p.last().expect("nonempty"));
    }
    post_check(g, ControlPlan::from_assignment(g, assignment))
}

fn post_check(g: &MarkedDigraph, plan: ControlPlan) -> Result<ControlPlan, RealizeError> {
    let expected = n_star(g);
    if NStar::Finite(plan.controlled.len()) != expected {
        return Err(RealizeError::PostCheck(format!(
            "plan controls {} vertices, minimum is {:?}",
            plan.controlled.len(),
            expected
        )));
    }
    if !is_sog(&plan.result) {
        return Err(RealizeError::PostCheck("result is not an SOG".into()));
    }
    Ok(plan)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub seed: u64,
    /// Sensors placed uniformly at random before measuring the control cost.
    pub sensors: usize,
    /// Mean minimum number of marks on the unmarked graph.
    pub mean_marks: f64,
    pub mean_mark_fraction: f64,
    /// Mean minimum control cost with the random sensors in place.
    pub mean_control: Option<f64>,
    /// Mean number of sensors sitting on P1 failures or alone on closed cycles.
    pub mean_h_star: Option<f64>,
    pub mean_control_plus_h_star: Option<f64>,
}

/// Erdős–Rényi experiment. Each trial draws a fresh graph from its own
/// seeded stream, measures the minimum marking of the unmarked graph, and,
/// when `sensors > 0`, places that many random sensors and measures the
/// minimum control cost and the number of sensors meeting the failure
/// conditions.
pub fn random_experiment(n: usize, p: f64, trials: usize, seed: u64, sensors: usize) -> ExperimentSummary {
    let mut marks = 0usize;
    let mut control = 0usize;
    let mut h_star = 0usize;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let mut g = erdos_renyi(n, p, &mut rng);
        marks += solve_problem1(&g).added_marks.len();
        if sensors > 0 {
            mark_k(&mut g, sensors, &mut rng);
            control += n_star(&g).finite().expect("sensors placed");
            h_star += sensor_failure_conditions(&g).len();
        }
    }
    let tr = trials.max(1) as f64;
    let mean_marks = marks as f64 / tr;
    let with_sensors = |x: f64| (sensors > 0).then_some(x);
    ExperimentSummary {
        n,
        p,
        trials,
        seed,
        sensors,
        mean_marks,
        mean_mark_fraction: mean_marks / n as f64,
        mean_control: with_sensors(control as f64 / tr),
        mean_h_star: with_sensors(h_star as f64 / tr),
        mean_control_plus_h_star: with_sensors((control + h_star) as f64 / tr),
    }
}
