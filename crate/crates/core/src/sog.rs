//! Deciding structural observability.
//!
//! Every vertex with in-degree one hangs below its unique in-neighbor, which
//! turns the digraph into a pseudoforest (each vertex has at most one parent).
//! Both properties are read off that forest:
//!
//! * P1: every simple vertex has at least one child.
//! * P2: every cycle of the forest made only of simple vertices has a child
//!   hanging off the cycle.

use serde::Serialize;
use thiserror::Error;

use crate::graph::MarkedDigraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SogError {
    #[error("graph is not structurally observable")]
    NotSog,
    #[error("invalid observed path cover: {0}")]
    InvalidCover(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// The unique-in-neighbor forest of a digraph.
#[derive(Debug, Clone)]
pub(crate) struct Forest {
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl Forest {
    pub fn of(g: &MarkedDigraph) -> Self {
        let n = g.n();
        let mut parent = vec![None; n + 1];
        let mut children = vec![Vec::new(); n + 1];
        for v in g.vertices() {
            if let Some(u) = g.unique_in_neighbor(v) {
                parent[v] = Some(u);
                children[u].push(v);
            }
        }
        Forest { parent, children }
    }

    /// Cycles of the forest, each starting at its lowest vertex and listed so
    /// that every vertex is the parent of the next one. Sorted by first vertex.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.parent.len() - 1;
        // 0 = unvisited, 1 = on the current walk, 2 = finished
        let mut state = vec![0u8; n + 1];
        let mut cycles = Vec::new();
        for start in 1..=n {
            if state[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut v = Some(start);
            while let Some(x) = v {
                match state[x] {
                    0 => {
                        state[x] = 1;
                        walk.push(x);
                        v = self.parent[x];
                    }
                    1 => {
                        let pos = walk.iter().position(|&w| w == x).expect("on walk");
                        let mut cycle: Vec<usize> = walk[pos..].iter().rev().copied().collect();
                        let min_at = cycle
                            .iter()
                            .enumerate()
                            .min_by_key(|&(_, &w)| w)
                            .map(|(i, _)| i)
                            .unwrap_or(0);
                        cycle.rotate_left(min_at);
                        cycles.push(cycle);
                        break;
                    }
                    _ => break,
                }
            }
            for w in walk {
                state[w] = 2;
            }
        }
        cycles.sort();
        cycles
    }

    /// Whether some vertex of `cycle` has a child outside it.
    pub fn has_exit(&self, cycle: &[usize]) -> bool {
        cycle
            .iter()
            .any(|&c| self.children[c].iter().any(|w| !cycle.contains(w)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    /// Simple vertices that are nobody's unique in-neighbor.
    pub p1_failures: Vec<usize>,
    /// Cycles in which each vertex is the unique in-neighbor of the next.
    pub op_ccs: Vec<Vec<usize>>,
    /// The all-simple cycles among `op_ccs` with no vertex outside hanging off them.
    pub p2_failures: Vec<Vec<usize>>,
    pub verdict: bool,
}

pub fn check_properties(g: &MarkedDigraph) -> PropertyReport {
    let forest = Forest::of(g);
    let p1_failures: Vec<usize> = g
        .vertices()
        .filter(|&v| !g.is_marked(v) && forest.children[v].is_empty())
        .collect();
    let op_ccs = forest.cycles();
    let p2_failures: Vec<Vec<usize>> = op_ccs
        .iter()
        .filter(|c| c.iter().all(|&v| !g.is_marked(v)) && !forest.has_exit(c))
        .cloned()
        .collect();
    let verdict = p1_failures.is_empty() && p2_failures.is_empty();
    PropertyReport {
        p1_failures,
        op_ccs,
        p2_failures,
        verdict,
    }
}

/// Vertex-disjoint observed paths covering every vertex; each path is listed
/// from its head to its marked terminal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ObservedPathCover {
    pub paths: Vec<Vec<usize>>,
}

impl ObservedPathCover {
    pub fn validate(&self, g: &MarkedDigraph) -> Result<(), SogError> {
        let bad = |m: String| Err(SogError::InvalidCover(m));
        let mut seen = vec![false; g.n() + 1];
        for path in &self.paths {
            let Some((&terminal, body)) = path.split_last() else {
                return bad("empty path".into());
            };
            if !g.is_marked(terminal) {
                return bad(format!("terminal v{terminal} is not marked"));
            }
            if let Some(v) = body.iter().find(|&&v| g.is_marked(v)) {
                return bad(format!("marked v{v} is not a terminal"));
            }
            for w in path.windows(2) {
                if g.unique_in_neighbor(w[1]) != Some(w[0]) {
                    return bad(format!("v{} is not the unique in-neighbor of v{}", w[0], w[1]));
                }
            }
            for &v in path {
                if v == 0 || v > g.n() || seen[v] {
                    return bad(format!("v{v} repeated or out of range"));
                }
                seen[v] = true;
            }
        }
        match g.vertices().find(|&v| !seen[v]) {
            Some(v) => bad(format!("v{v} is not covered")),
            None => Ok(()),
        }
    }
}

/// Grow one path backwards from each marked vertex (ascending) for as long as
/// the head has a unique in-neighbor that is simple and still free.
pub fn decompose_observed_paths(g: &MarkedDigraph) -> Option<ObservedPathCover> {
    let mut assigned = vec![false; g.n() + 1];
    let mut paths = Vec::new();
    for m in g.marked() {
        assigned[m] = true;
        let mut path = vec![m];
        let mut head = m;
        while let Some(u) = g.unique_in_neighbor(head) {
            if g.is_marked(u) || assigned[u] {
                break;
            }
            assigned[u] = true;
            path.push(u);
            head = u;
        }
        path.reverse();
        paths.push(path);
    }
    if assigned[1..].iter().all(|&a| a) {
        Some(ObservedPathCover { paths })
    } else {
        None
    }
}

/// Whether `g` satisfies P1 and P2.
pub fn is_sog(g: &MarkedDigraph) -> bool {
    check_properties(g).verdict
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SogAnalysis {
    #[serde(flatten)]
    pub report: PropertyReport,
    pub cover: Option<ObservedPathCover>,
    pub critical_sensors: Option<Vec<usize>>,
}

impl SogAnalysis {
    pub fn verdict(&self) -> bool {
        self.report.verdict
    }
}

/// Property check, path decomposition and sensor classification together.
/// The two verdicts are compared and any disagreement is reported as an error.
pub fn analyze(g: &MarkedDigraph) -> Result<SogAnalysis, SogError> {
    let report = check_properties(g);
    let cover = decompose_observed_paths(g);
    if report.verdict != cover.is_some() {
        return Err(SogError::Inconsistent(format!(
            "property verdict {} but decomposition {}",
            report.verdict,
            if cover.is_some() { "succeeded" } else { "failed" }
        )));
    }
    if let Some(c) = &cover {
        c.validate(g)?;
    }
    let critical_sensors = report.verdict.then(|| sensor_failure_conditions(g));
    Ok(SogAnalysis {
        report,
        cover,
        critical_sensors,
    })
}

/// Marked vertices whose loss breaks structural observability: those with no
/// child in the unique-in-neighbor forest, and the sole mark on a forest cycle
/// with nothing hanging off it.
pub fn critical_sensors(g: &MarkedDigraph) -> Result<Vec<usize>, SogError> {
    if !is_sog(g) {
        return Err(SogError::NotSog);
    }
    Ok(sensor_failure_conditions(g))
}

/// The classification behind [`critical_sensors`], without the SOG precondition.
pub fn sensor_failure_conditions(g: &MarkedDigraph) -> Vec<usize> {
    let forest = Forest::of(g);
    let mut critical = vec![false; g.n() + 1];
    for v in g.marked() {
        if forest.children[v].is_empty() {
            critical[v] = true;
        }
    }
    for cycle in forest.cycles() {
        let marks: Vec<usize> = cycle.iter().copied().filter(|&v| g.is_marked(v)).collect();
        if let [only] = marks[..] {
            if !forest.has_exit(&cycle) {
                critical[only] = true;
            }
        }
    }
    g.vertices().filter(|&v| critical[v]).collect()
}

/// Reference classification: unmark each sensor in turn and re-test.
pub fn critical_sensors_by_retest(g: &MarkedDigraph) -> Vec<usize> {
    g.marked()
        .into_iter()
        .filter(|&v| {
            let mut h = g.clone();
            h.unmark(v).expect("marked vertex is in range");
            !is_sog(&h)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn triad() -> MarkedDigraph {
        parse_graph("digraph 3\nmarked 1\nedge 2 1\nedge 3 2\nedge 1 3\nedge 2 3\nedge 3 3").unwrap()
    }

    #[test]
    fn three_node_example_is_sog() {
        let g = triad();
        let r = check_properties(&g);
        assert!(r.p1_failures.is_empty());
        assert!(r.op_ccs.is_empty());
        assert!(r.verdict);
        let cover = decompose_observed_paths(&g).unwrap();
        assert_eq!(cover.paths, vec![vec![3, 2, 1]]);
        assert_eq!(critical_sensors(&g).unwrap(), vec![1]);
    }

    #[test]
    fn lone_simple_vertex_fails() {
        let g = MarkedDigraph::new(1).unwrap();
        let r = check_properties(&g);
        assert_eq!(r.p1_failures, vec![1]);
        assert!(!r.verdict);
        assert!(decompose_observed_paths(&g).is_none());
        assert_eq!(critical_sensors(&g), Err(SogError::NotSog));
    }

    #[test]
    fn all_marked_edgeless() {
        let g = MarkedDigraph::from_edges(4, [], 1..=4).unwrap();
        let cover = decompose_observed_paths(&g).unwrap();
        assert_eq!(cover.paths, vec![vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn marked_three_cycle() {
        let g = MarkedDigraph::from_edges(3, [(1, 2), (2, 3), (3, 1)], [1]).unwrap();
        let r = check_properties(&g);
        assert_eq!(r.op_ccs, vec![vec![1, 2, 3]]);
        assert!(r.p2_failures.is_empty());
        assert!(r.verdict);
        assert_eq!(decompose_observed_paths(&g).unwrap().paths, vec![vec![2, 3, 1]]);
    }

    #[test]
    fn cycles_are_listed_forward_from_lowest_vertex() {
        let g = MarkedDigraph::from_edges(4, [(4, 2), (2, 3), (3, 4), (1, 1)], []).unwrap();
        let r = check_properties(&g);
        assert_eq!(r.op_ccs, vec![vec![1], vec![2, 3, 4]]);
        assert_eq!(r.p2_failures, r.op_ccs);
    }

    #[test]
    fn simple_cycle_with_exit_passes_p2() {
        let g = MarkedDigraph::from_edges(3, [(1, 2), (2, 1), (2, 3)], [3]).unwrap();
        let r = check_properties(&g);
        assert_eq!(r.op_ccs, vec![vec![1, 2]]);
        assert!(r.p2_failures.is_empty());
        assert!(r.verdict);
    }

    #[test]
    fn parallel_paths_have_critical_terminals() {
        let g = MarkedDigraph::from_edges(4, [(1, 2), (3, 4)], [2, 4]).unwrap();
        assert_eq!(critical_sensors(&g).unwrap(), vec![2, 4]);
        assert_eq!(critical_sensors_by_retest(&g), vec![2, 4]);
    }

    #[test]
    fn sensor_with_a_child_off_any_cycle_is_redundant() {
        // v1 marked with unique child v2, which is also marked
        let g = MarkedDigraph::from_edges(2, [(1, 2)], [1, 2]).unwrap();
        assert_eq!(critical_sensors(&g).unwrap(), vec![2]);
        assert_eq!(critical_sensors_by_retest(&g), vec![2]);
    }

    #[test]
    fn sole_mark_on_closed_cycle_is_critical() {
        let g = MarkedDigraph::from_edges(2, [(1, 2), (2, 1)], [2]).unwrap();
        assert_eq!(critical_sensors(&g).unwrap(), vec![2]);
        let two = MarkedDigraph::from_edges(2, [(1, 2), (2, 1)], [1, 2]).unwrap();
        assert_eq!(critical_sensors(&two).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn analysis_serializes_with_flat_keys() {
        let a = analyze(&triad()).unwrap();
        let json = serde_json::to_value(&a).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            vec!["cover", "critical_sensors", "op_ccs", "p1_failures", "p2_failures", "verdict"]
        );
        assert_eq!(json["cover"], serde_json::json!([[3, 2, 1]]));
    }

    #[test]
    fn cover_validation_catches_defects() {
        let g = triad();
        let bad = ObservedPathCover { paths: vec![vec![2, 3, 1]] };
        assert!(bad.validate(&g).is_err());
        let short = ObservedPathCover { paths: vec![vec![2, 1]] };
        assert!(short.validate(&g).is_err());
    }
}
