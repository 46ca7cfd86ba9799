//! Browser bindings. Every function takes plain text and returns a JSON
//! string, or an error message the page shows as-is.

use serde_json::json;
use sog_core::realize::{n_star, random_experiment, solve_problem2, NStar};
use sog_core::{analyze, parse_graph, Highlight};
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest graph the page will run the control solver on.
const MAX_DEMO_VERTICES: usize = 2000;

fn parse(text: &str) -> Result<sog_core::MarkedDigraph, String> {
    let g = parse_graph(text).map_err(|e| e.to_string())?;
    if g.n() > MAX_DEMO_VERTICES {
        return Err(format!("the demo accepts at most {MAX_DEMO_VERTICES} vertices"));
    }
    Ok(g)
}

/// SOG verdict, property report, observed paths and a DOT rendering with
/// the P1 failures filled in.
#[wasm_bindgen]
pub fn check_graph(text: &str) -> Result<String, String> {
    let g = parse(text)?;
    let a = analyze(&g).map_err(|e| e.to_string())?;
    let dot = g.to_dot(&[Highlight::p1_failures(a.report.p1_failures.iter().copied())]);
    Ok(json!({ "analysis": a, "dot": dot }).to_string())
}

/// Minimum control plan and the repaired graph with controlled vertices filled in.
#[wasm_bindgen]
pub fn control_plan(text: &str) -> Result<String, String> {
    let g = parse(text)?;
    if n_star(&g) == NStar::Infinite {
        return Err("no marked vertex: no control plan exists".into());
    }
    let plan = solve_problem2(&g).map_err(|e| e.to_string())?;
    let dot = plan.result.to_dot(&[Highlight::controlled(plan.controlled.iter().copied())]);
    Ok(json!({ "plan": plan, "dot": dot }).to_string())
}

/// Mean minimum-marking fraction on G(n, c/n) for `c` in `0, step, ..., c_max`.
#[wasm_bindgen]
pub fn marking_curve(n: usize, c_max: f64, step: f64, trials: usize, seed: u64) -> Result<String, String> {
    if !(1..=500).contains(&n) || trials == 0 || trials > 200 {
        return Err("need 1 <= n <= 500 and 1 <= trials <= 200".into());
    }
    if !(step > 0.0 && c_max >= 0.0 && c_max / step <= 100.0) {
        return Err("need step > 0 and at most 100 points".into());
    }
    let points: Vec<_> = (0..=(c_max / step).floor() as usize)
        .map(|i| {
            let c = i as f64 * step;
            let p = (c / n as f64).min(1.0);
            let s = random_experiment(n, p, trials, seed, 0);
            json!({ "c": c, "fraction": s.mean_mark_fraction })
        })
        .collect();
    Ok(json!({ "n": n, "trials": trials, "seed": seed, "points": points }).to_string())
}

/// The 29-node T-LGL dependency graph, for the page's example button.
#[wasm_bindgen]
pub fn tlgl29_graph() -> String {
    sog_core::corpus::TLGL29_GRAPH.to_string()
}
