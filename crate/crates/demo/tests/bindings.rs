use serde_json::Value;
use sog_core::corpus::{TRIAD_GRAPH, TLGL29_GRAPH};
use sog_demo::{check_graph, control_plan, marking_curve};

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn check_reports_the_verdict_and_dot() {
    let v = parse(check_graph(TRIAD_GRAPH));
    assert_eq!(v["analysis"]["verdict"], true);
    assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
    assert!(check_graph("digraph 2\nedge 1 5\n").unwrap_err().contains("line 2"));
}

#[test]
fn tlgl_plan_has_fifteen_controls() {
    let v = parse(control_plan(TLGL29_GRAPH));
    assert_eq!(v["plan"]["n_star"], 15);
    assert!(control_plan("digraph 2\nedge 1 2\n").is_err());
}

#[test]
fn curve_is_deterministic_and_starts_at_one() {
    let a = marking_curve(40, 2.0, 0.5, 10, 3).unwrap();
    assert_eq!(a, marking_curve(40, 2.0, 0.5, 10, 3).unwrap());
    let v: Value = serde_json::from_str(&a).unwrap();
    let points = v["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    // no edges: every vertex needs its own mark
    assert_eq!(points[0]["fraction"], 1.0);
    assert!(marking_curve(0, 1.0, 0.5, 10, 1).is_err());
}
