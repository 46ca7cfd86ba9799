mod common;

use common::arb_graph;
use proptest::prelude::*;
use sog_core::corpus::{TRIAD_GRAPH, TLGL29_GRAPH};
use sog_core::{parse_graph, GraphError, Highlight, MarkedDigraph};

/// Boolean matrix product, both operands n × n with 0/1 entries.
fn bool_mul(a: &[Vec<u8>], b: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| u8::from((0..n).any(|k| a[i][k] == 1 && b[k][j] == 1))).collect())
        .collect()
}

#[test]
fn triad_reads_off_its_dependencies() {
    let g = parse_graph(TRIAD_GRAPH).unwrap();
    assert_eq!(g.in_neighbors(3).unwrap(), &[1, 2, 3]);
    assert_eq!(g.in_neighbors(1).unwrap(), &[2]);
    assert_eq!(g.distance(3, 1).unwrap(), Some(2));
    assert_eq!(g.distance(3, 3).unwrap(), Some(1));
}

#[test]
fn unreachable_and_isolated() {
    let g = MarkedDigraph::from_edges(3, [(1, 2)], [2]).unwrap();
    assert_eq!(g.distance(2, 1).unwrap(), None);
    assert_eq!(g.distance(1, 1).unwrap(), None);
    assert!(g.in_neighbors(3).unwrap().is_empty());
    assert!(matches!(g.distance(4, 1), Err(GraphError::OutOfRange { vertex: 4, .. })));
}

#[test]
fn out_of_range_edge_is_rejected() {
    let err = parse_graph("digraph 3\nedge 4 1").unwrap_err();
    assert!(matches!(err, GraphError::OutOfRange { vertex: 4, n: 3, line: Some(2) }));
}

#[test]
fn dot_statement_counts() {
    let g = parse_graph(TRIAD_GRAPH).unwrap();
    let dot = g.to_dot(&[Highlight::p1_failures([])]);
    assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 3);
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 5);
    let tlgl = parse_graph(TLGL29_GRAPH).unwrap();
    assert_eq!(tlgl.to_dot(&[]).lines().filter(|l| l.contains("[label=")).count(), 29);
    let empty = MarkedDigraph::new(1).unwrap().to_dot(&[]);
    assert!(empty.starts_with("digraph {") && empty.trim_end().ends_with('}'));
    assert_eq!(empty.lines().filter(|l| l.contains("->")).count(), 0);
}

proptest! {
    #[test]
    fn text_round_trip(g in arb_graph(10)) {
        prop_assert_eq!(parse_graph(&g.to_text()).unwrap(), g.clone());
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<MarkedDigraph>(&json).unwrap(), g);
    }

    #[test]
    fn adjacency_matrix_matches_edges(g in arb_graph(10)) {
        let a = g.adjacency_matrix();
        for i in g.vertices() {
            for j in g.vertices() {
                prop_assert_eq!(a.get(i, j) == 1, g.has_edge(i, j));
            }
        }
    }

    #[test]
    fn distance_is_the_first_nonzero_power(g in arb_graph(8)) {
        let a = g.adjacency_matrix().entries;
        let n = g.n();
        let mut power = a.clone();
        let mut first = vec![vec![None; n]; n];
        for k in 1..=n {
            for i in 0..n {
                for j in 0..n {
                    if power[i][j] == 1 && first[i][j].is_none() {
                        first[i][j] = Some(k);
                    }
                }
            }
            power = bool_mul(&power, &a);
        }
        for i in g.vertices() {
            for j in g.vertices() {
                prop_assert_eq!(g.distance(i, j).unwrap(), first[i - 1][j - 1]);
            }
        }
    }

    #[test]
    fn relabelling_keeps_the_structure(g in arb_graph(8)) {
        let (h, perm) = g.relabel_canonical();
        prop_assert_eq!(h.edge_count(), g.edge_count());
        for (i, j) in g.edges() {
            prop_assert!(h.has_edge(perm[i], perm[j]));
        }
        let k = g.marked_count();
        prop_assert_eq!(h.marked(), (1..=k).collect::<Vec<_>>());
    }
}
