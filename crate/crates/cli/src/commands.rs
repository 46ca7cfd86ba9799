use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use sog_core::boolnet::{bits_to_string, observability_bruteforce, parse_bits, parse_bn, BooleanNetwork};
use sog_core::ffn::{design_observable_ffn, observability_rank, parse_ffn, strongly_structural_check, FfnDesign};
use sog_core::realize::{compute_m_sets, compute_s_sets, n_star, solve_problem1, solve_problem2, NStar};
use sog_core::stp::{build_observer, design_pinning, estimate_initial_state, PinningPlan, Polarity};
use sog_core::{analyze, check_properties, critical_sensors, is_sog, parse_graph, Highlight, MarkedDigraph};

use crate::report::{CliError, Input, Outcome};

fn graph(input: &Input) -> Result<MarkedDigraph, CliError> {
    parse_graph(&input.text).map_err(|e| input.error(e.line(), e))
}

fn network(input: &Input) -> Result<BooleanNetwork, CliError> {
    let parsed = parse_bn(&input.text).map_err(|e| input.error(e.line(), e))?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", input.path.display());
    }
    Ok(parsed.network)
}

fn failed(e: impl ToString) -> CliError {
    CliError::Failed(e.to_string())
}

fn list(vs: &[usize]) -> String {
    if vs.is_empty() {
        return "none".into();
    }
    vs.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join(" ")
}

fn path(vs: &[usize]) -> String {
    vs.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join(" -> ")
}

pub fn check(input: &Input) -> Result<Outcome, CliError> {
    let g = graph(input)?;
    let a = analyze(&g).map_err(failed)?;
    let r = &a.report;
    let mut text = format!("SOG: {}\n", if a.verdict() { "yes" } else { "no" });
    let _ = writeln!(text, "P1 failures: {}", list(&r.p1_failures));
    let _ = writeln!(text, "OP-CCs: {}", r.op_ccs.len());
    for c in &r.p2_failures {
        let _ = writeln!(text, "P2 failure: {}", list(c));
    }
    if let Some(cover) = &a.cover {
        for p in &cover.paths {
            let _ = writeln!(text, "observed path: {}", path(p));
        }
    }
    let dot = g.to_dot(&[Highlight::p1_failures(r.p1_failures.iter().copied())]);
    Ok(Outcome::new(a.verdict(), text, &a).with_dot(dot))
}

pub fn mark_min(input: &Input) -> Result<Outcome, CliError> {
    let g = graph(input)?;
    let plan = solve_problem1(&g);
    let marked = g.with_marks(plan.added_marks.iter().copied()).map_err(failed)?;
    if !is_sog(&marked) {
        return Err(failed("marking plan does not yield an SOG"));
    }
    let text = format!("minimum extra marks: {}\nmark: {}\n", plan.added_marks.len(), list(&plan.added_marks));
    let result = json!({ "count": plan.added_marks.len(), "added_marks": plan.added_marks });
    let dot = marked.to_dot(&[Highlight::new("added_mark", "gold", plan.added_marks.iter().copied())]);
    Ok(Outcome::new(true, text, result).with_dot(dot))
}

#[derive(Serialize)]
struct ControlReport {
    n_star: NStar,
    m_bar: Vec<usize>,
    s2: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plan: Option<sog_core::realize::ControlPlan>,
    /// The plan keyed the other way: each new in-neighbor with the vertices it drives.
    #[serde(skip_serializing_if = "Option::is_none")]
    by_driver: Option<BTreeMap<usize, Vec<usize>>>,
}

pub fn control_min(input: &Input) -> Result<Outcome, CliError> {
    let g = graph(input)?;
    let m = compute_m_sets(&g);
    let s = compute_s_sets(&g);
    let star = n_star(&g);
    let mut report = ControlReport {
        n_star: star,
        m_bar: m.m_bar,
        s2: s.violated,
        plan: None,
        by_driver: None,
    };
    let NStar::Finite(k) = star else {
        let text = "no marked vertex: no control plan makes the graph observable\n".to_string();
        return Ok(Outcome::new(false, text, report));
    };
    let plan = solve_problem2(&g).map_err(failed)?;
    let mut text = format!(
        "minimum controlled vertices: {k} (|M̄| = {}, |S²| = {})\n",
        report.m_bar.len(),
        report.s2.len()
    );
    let _ = writeln!(text, "controlled vertex <- new in-neighbor:");
    for (w, u) in &plan.assignment {
        let _ = writeln!(text, "  v{w} <- v{u}");
    }
    let by_driver = plan.by_driver();
    let _ = writeln!(text, "in-neighbor -> vertices it now drives:");
    for (u, ws) in &by_driver {
        let _ = writeln!(text, "  v{u} -> {}", list(ws));
    }
    let dot = plan.result.to_dot(&[Highlight::controlled(plan.controlled.iter().copied())]);
    report.plan = Some(plan);
    report.by_driver = Some(by_driver);
    Ok(Outcome::new(true, text, report).with_dot(dot))
}

pub fn critical(input: &Input) -> Result<Outcome, CliError> {
    let g = graph(input)?;
    match critical_sensors(&g) {
        Ok(c) => {
            let text = format!("critical sensors: {}\n", list(&c));
            let dot = g.to_dot(&[Highlight::new("critical", "tomato", c.iter().copied())]);
            Ok(Outcome::new(true, text, json!({ "critical_sensors": c })).with_dot(dot))
        }
        Err(_) => Ok(Outcome::new(
            false,
            "not an SOG: critical sensors are undefined\n".into(),
            json!({ "critical_sensors": null }),
        )),
    }
}

pub fn export_dot(input: &Input, p1: bool) -> Result<Outcome, CliError> {
    let g = graph(input)?;
    let highlights = if p1 {
        vec![Highlight::p1_failures(check_properties(&g).p1_failures)]
    } else {
        Vec::new()
    };
    let dot = g.to_dot(&highlights);
    Ok(Outcome::new(true, dot.clone(), json!({ "dot": dot })).with_dot(dot))
}

pub fn bn_deps(input: &Input) -> Result<Outcome, CliError> {
    let g = network(input)?.dependency_graph();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let result = json!({ "n": g.n(), "edges": edges, "marked": g.marked() });
    Ok(Outcome::new(true, g.to_text(), result).with_dot(g.to_dot(&[])))
}

pub fn bn_obs(input: &Input) -> Result<Outcome, CliError> {
    let bn = network(input)?;
    let observable = observability_bruteforce(&bn).map_err(|e| input.error(e.line(), e))?;
    let text = format!("observable: {}\n", if observable { "yes" } else { "no" });
    Ok(Outcome::new(observable, text, json!({ "observable": observable })))
}

pub fn bn_structural(input: &Input) -> Result<Outcome, CliError> {
    let g = network(input)?.dependency_graph();
    let r = check_properties(&g);
    let text = format!(
        "dependency graph is an SOG: {}\nP1 failures: {}\n",
        if r.verdict { "yes" } else { "no" },
        list(&r.p1_failures)
    );
    let dot = g.to_dot(&[Highlight::p1_failures(r.p1_failures.iter().copied())]);
    Ok(Outcome::new(r.verdict, text, &r).with_dot(dot))
}

fn pin(bn: &BooleanNetwork, negate: &[usize]) -> Result<PinningPlan, CliError> {
    let g = bn.dependency_graph();
    let plan = solve_problem2(&g).map_err(failed)?;
    let polarity: BTreeMap<usize, Polarity> = negate.iter().map(|&v| (v, Polarity::Negation)).collect();
    if let Some(v) = negate.iter().find(|v| !plan.controlled.contains(v)) {
        return Err(failed(format!("x{v} is not a pinned node")));
    }
    design_pinning(bn, &plan, &polarity).map_err(failed)
}

pub fn bn_pin(input: &Input, negate: &[usize]) -> Result<Outcome, CliError> {
    let bn = network(input)?;
    let pinning = pin(&bn, negate)?;
    let observer = build_observer(&bn, &pinning).map_err(failed)?;
    let mut text = format!("pinned nodes: {}\n", pinning.nodes.len());
    for p in &pinning.nodes {
        let _ = writeln!(text, "x{} = {}  (type {:?}, {:?})", p.node, p.realized_expr, p.kind, p.operator);
    }
    let _ = writeln!(text, "observer horizon: {}", observer.horizon());
    let result = json!({ "pinning": pinning, "observer": observer, "horizon": observer.horizon() });
    let g = pinning.network.dependency_graph();
    let dot = g.to_dot(&[Highlight::controlled(pinning.controlled.iter().copied())]);
    Ok(Outcome::new(true, text, result).with_dot(dot))
}

/// Output bit strings from the `y` column, one row per time step.
fn read_outputs(input: &Input, h: usize) -> Result<Vec<u64>, CliError> {
    let mut reader = csv::Reader::from_reader(input.text.as_bytes());
    let headers = reader.headers().map_err(|e| input.error(Some(1), e))?.clone();
    let col = headers
        .iter()
        .position(|c| c.trim() == "y")
        .ok_or_else(|| input.error(Some(1), "no `y` column"))?;
    let mut ys = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| input.error(Some(line), e))?;
        let field = record.get(col).unwrap_or("").trim();
        match parse_bits(field) {
            Some(y) if field.len() == h => ys.push(y),
            _ => return Err(input.error(Some(line), format!("expected {h} output bits, found {field:?}"))),
        }
    }
    Ok(ys)
}

pub fn bn_estimate(input: &Input, outputs: &Input, negate: &[usize]) -> Result<Outcome, CliError> {
    let bn = network(input)?;
    let pinning = pin(&bn, negate)?;
    let observer = build_observer(&bn, &pinning).map_err(failed)?;
    let ys = read_outputs(outputs, bn.outputs().len())?;
    let x0 = estimate_initial_state(&observer, &ys).map_err(failed)?;
    let bits = bits_to_string(x0, bn.n());
    Ok(Outcome::new(true, format!("x0 = {bits}\n"), json!({ "x0": bits })))
}

pub fn bn_simulate(input: &Input, init: &str, steps: usize, pinned: Option<&[usize]>) -> Result<Outcome, CliError> {
    let bn = network(input)?;
    let bn = match pinned {
        Some(negate) => pin(&bn, negate)?.network,
        None => bn,
    };
    let x0 = match parse_bits(init) {
        Some(x) if init.len() == bn.n() => x,
        _ => return Err(failed(format!("--init must be {} bits of 0/1, x1 first", bn.n()))),
    };
    let traj = bn.simulate(x0, steps);
    let rows: Vec<_> = traj
        .states
        .iter()
        .zip(&traj.outputs)
        .enumerate()
        .map(|(k, (&x, &y))| json!({ "k": k, "x": bits_to_string(x, traj.n), "y": bits_to_string(y, traj.h) }))
        .collect();
    Ok(Outcome::new(true, traj.to_csv(), json!({ "trajectory": rows })))
}

pub fn ffn_design(input: &Input, p: u64) -> Result<Outcome, CliError> {
    let g = graph(input)?;
    let design = design_observable_ffn(&g, p).map_err(failed)?;
    let (ok, text, dot) = match &design {
        FfnDesign::Designed { network, paths } => {
            let mut text = format!("observable design over F_{p} on {} paths\n", paths.len());
            for p in paths {
                let _ = writeln!(text, "path: {}", path(p));
            }
            let support = network.support();
            (true, text, Some(support.to_dot(&[])))
        }
        FfnDesign::NoCover => (false, "no path cover found\n".to_string(), None),
    };
    let out = Outcome::new(ok, text, &design);
    Ok(match dot {
        Some(d) => out.with_dot(d),
        None => out,
    })
}

pub fn ffn_check(input: &Input) -> Result<Outcome, CliError> {
    let (g, net) = parse_ffn(&input.text).map_err(|e| input.error(e.line(), e))?;
    let observable = observability_rank(&net).map_err(failed)?;
    let structural = strongly_structural_check(&g);
    let text = format!(
        "observable over F_{}: {}\ngraph is an SOG: {}\n",
        net.p,
        if observable { "yes" } else { "no" },
        if structural { "yes" } else { "no" }
    );
    let result = json!({ "p": net.p, "observable": observable, "sog": structural });
    Ok(Outcome::new(observable, text, result).with_dot(g.to_dot(&[])))
}

pub fn rand_exp(n: usize, p: f64, trials: usize, seed: u64, sensors: usize) -> Result<Outcome, CliError> {
    if n == 0 || !(0.0..=1.0).contains(&p) {
        return Err(failed("need n >= 1 and 0 <= p <= 1"));
    }
    if sensors > n {
        return Err(failed("more sensors than vertices"));
    }
    let s = sog_core::realize::random_experiment(n, p, trials, seed, sensors);
    let mut text = format!(
        "n = {n}, p = {p}, trials = {trials}, seed = {seed}\nmean minimum marks: {:.3} ({:.4} n)\n",
        s.mean_marks, s.mean_mark_fraction
    );
    if let (Some(c), Some(h)) = (s.mean_control, s.mean_h_star) {
        let _ = writeln!(text, "with {sensors} sensors: mean control {c:.3}, mean critical sensors {h:.3}");
    }
    Ok(Outcome::new(true, text, &s))
}
