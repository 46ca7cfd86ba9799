use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::expr::{Expr, ExprError};
use crate::graph::MarkedDigraph;

/// Largest in-degree accepted when building truth tables.
pub const MAX_ARITY: usize = 24;
/// States are packed into a `u64`.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BnError {
    #[error("line {line}: {source}")]
    Expr {
        line: usize,
        #[source]
        source: ExprError,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unknown variable x{var}")]
    UnknownVariable { line: usize, var: usize },
    #[error("line {line}: node x{node} is defined twice")]
    DuplicateNode { line: usize, node: usize },
    #[error("node x{0} has no update rule")]
    MissingNode(usize),
    #[error("missing `outputs:` line")]
    MissingOutputs,
    #[error("node x{node} has {arity} inputs, more than the limit of {limit}")]
    Arity { node: usize, arity: usize, limit: usize },
    #[error("network has {0} nodes, more than the limit of {1}")]
    TooLarge(usize, usize),
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error("no function with all inputs essential found for node x{0} within the sampling budget")]
    RejectionBudget(usize),
}

impl BnError {
    pub fn line(&self) -> Option<usize> {
        match self {
            BnError::Expr { line, .. }
            | BnError::Syntax { line, .. }
            | BnError::UnknownVariable { line, .. }
            | BnError::DuplicateNode { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Update rule of one node as a truth table over its inputs. Row `r` holds the
/// value when input `inputs[b]` equals bit `b` of `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeFunction {
    pub inputs: Vec<usize>,
    pub table: Vec<bool>,
}

impl NodeFunction {
    pub fn constant(value: bool) -> Self {
        NodeFunction {
            inputs: Vec::new(),
            table: vec![value],
        }
    }

    /// Tabulate `e` over the given (ascending) inputs.
    pub fn from_expr(e: &Expr, inputs: Vec<usize>) -> Self {
        let table = (0..1usize << inputs.len())
            .map(|row| {
                e.eval(&|i| {
                    inputs
                        .iter()
                        .position(|&v| v == i)
                        .is_some_and(|b| row >> b & 1 == 1)
                })
            })
            .collect();
        NodeFunction { inputs, table }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Whether flipping input `b` changes the value for some row.
    pub fn is_essential(&self, b: usize) -> bool {
        (0..self.table.len()).any(|r| self.table[r] != self.table[r ^ (1 << b)])
    }

    /// Drop inputs that never matter. Returns the dropped variable indices.
    pub fn minimize(&mut self) -> Vec<usize> {
        let mut dropped = Vec::new();
        let mut b = 0;
        while b < self.inputs.len() {
            if self.is_essential(b) {
                b += 1;
                continue;
            }
            dropped.push(self.inputs.remove(b));
            let low = (1usize << b) - 1;
            self.table = (0..self.table.len() / 2)
                .map(|r| self.table[(r & low) | ((r & !low) << 1)])
                .collect();
        }
        dropped
    }

    /// Value of the rule in the packed state (bit `i - 1` holds `x_i`).
    pub fn eval(&self, state: u64) -> bool {
        let row = self
            .inputs
            .iter()
            .enumerate()
            .fold(0usize, |acc, (b, &v)| acc | (((state >> (v - 1)) & 1) as usize) << b);
        self.table[row]
    }

    /// Sum-of-minterms expression equivalent to the table.
    pub fn to_expr_string(&self) -> String {
        if self.inputs.is_empty() {
            return if self.table[0] { "1" } else { "0" }.into();
        }
        if self.table.iter().all(|&t| t) {
            return "1".into();
        }
        if self.table.iter().all(|&t| !t) {
            return "0".into();
        }
        if self.inputs.len() == 1 {
            let x = self.inputs[0];
            return if self.table[1] { format!("x{x}") } else { format!("!x{x}") };
        }
        let terms: Vec<String> = (0..self.table.len())
            .filter(|&r| self.table[r])
            .map(|r| {
                let lits: Vec<String> = self
                    .inputs
                    .iter()
                    .enumerate()
                    .map(|(b, &x)| if r >> b & 1 == 1 { format!("x{x}") } else { format!("!x{x}") })
                    .collect();
                format!("({})", lits.join(" & "))
            })
            .collect();
        terms.join(" | ")
    }
}

/// Synchronous Boolean network. State bit `i - 1` holds `x_i`; output bit `p`
/// holds `x_{outputs[p]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanNetwork {
    functions: Vec<NodeFunction>,
    outputs: Vec<usize>,
}

impl BooleanNetwork {
    /// Validates ranges, table sizes and that every listed input is essential.
    pub fn new(functions: Vec<NodeFunction>, outputs: Vec<usize>) -> Result<Self, BnError> {
        let n = functions.len();
        if n == 0 {
            return Err(BnError::Invalid("no nodes".into()));
        }
        if n > MAX_NODES {
            return Err(BnError::TooLarge(n, MAX_NODES));
        }
        for (idx, f) in functions.iter().enumerate() {
            let node = idx + 1;
            if f.inputs.len() > MAX_ARITY {
                return Err(BnError::Arity {
                    node,
                    arity: f.inputs.len(),
                    limit: MAX_ARITY,
                });
            }
            if !f.inputs.windows(2).all(|w| w[0] < w[1]) || f.inputs.iter().any(|&v| v == 0 || v > n) {
                return Err(BnError::Invalid(format!("inputs of x{node} must be ascending within 1..={n}")));
            }
            if f.table.len() != 1 << f.inputs.len() {
                return Err(BnError::Invalid(format!("truth table of x{node} has the wrong length")));
            }
            if let Some(b) = (0..f.inputs.len()).find(|&b| !f.is_essential(b)) {
                return Err(BnError::Invalid(format!(
                    "input x{} of x{node} is not essential",
                    f.inputs[b]
                )));
            }
        }
        let outputs: BTreeSet<usize> = outputs.into_iter().collect();
        if outputs.iter().any(|&v| v == 0 || v > n) {
            return Err(BnError::Invalid("output out of range".into()));
        }
        Ok(BooleanNetwork {
            functions,
            outputs: outputs.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.functions.len()
    }

    pub fn function(&self, v: usize) -> &NodeFunction {
        &self.functions[v - 1]
    }

    pub fn functions(&self) -> &[NodeFunction] {
        &self.functions
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn dependency_graph(&self) -> MarkedDigraph {
        MarkedDigraph::from_edges(
            self.n(),
            self.functions
                .iter()
                .enumerate()
                .flat_map(|(j, f)| f.inputs.iter().map(move |&i| (i, j + 1))),
            self.outputs.iter().copied(),
        )
        .expect("validated network")
    }

    pub fn step(&self, state: u64) -> u64 {
        self.functions
            .iter()
            .enumerate()
            .fold(0, |acc, (i, f)| acc | u64::from(f.eval(state)) << i)
    }

    pub fn output(&self, state: u64) -> u64 {
        self.outputs
            .iter()
            .enumerate()
            .fold(0, |acc, (p, &v)| acc | ((state >> (v - 1)) & 1) << p)
    }

    /// `steps` updates from `x0`; the trajectory holds `steps + 1` states.
    pub fn simulate(&self, x0: u64, steps: usize) -> StateTrajectory {
        let mut states = Vec::with_capacity(steps + 1);
        let mut x = x0;
        states.push(x);
        for _ in 0..steps {
            x = self.step(x);
            states.push(x);
        }
        let outputs = states.iter().map(|&s| self.output(s)).collect();
        StateTrajectory {
            n: self.n(),
            h: self.outputs.len(),
            states,
            outputs,
        }
    }

    /// Text in the format read by [`parse_bn`].
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (i, f) in self.functions.iter().enumerate() {
            let _ = writeln!(s, "x{} = {}", i + 1, f.to_expr_string());
        }
        let outs: Vec<String> = self.outputs.iter().map(|v| format!("x{v}")).collect();
        let _ = writeln!(s, "outputs: {}", outs.join(" "));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTrajectory {
    pub n: usize,
    pub h: usize,
    pub states: Vec<u64>,
    pub outputs: Vec<u64>,
}

impl StateTrajectory {
    /// CSV with columns `k,x,y`; bit strings list `x1` first.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,x,y\n");
        for (k, (&x, &y)) in self.states.iter().zip(&self.outputs).enumerate() {
            let _ = writeln!(s, "{k},{},{}", bits_to_string(x, self.n), bits_to_string(y, self.h));
        }
        s
    }
}

/// `"1011"` → `x1 = 1, x2 = 0, x3 = 1, x4 = 1`.
pub fn parse_bits(s: &str) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    s.bytes().enumerate().try_fold(0u64, |acc, (i, c)| match c {
        b'0' => Some(acc),
        b'1' => Some(acc | 1 << i),
        _ => None,
    })
}

pub fn bits_to_string(x: u64, width: usize) -> String {
    (0..width).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedNetwork {
    pub network: BooleanNetwork,
    /// Human-readable notes about dropped non-essential inputs.
    pub warnings: Vec<String>,
}

/// Read a network written as one `x<i> = <expr>` line per node and a single
/// `outputs: x<i> ...` line. `#` starts a comment.
pub fn parse_bn(text: &str) -> Result<ParsedNetwork, BnError> {
    let mut rules: Vec<(usize, usize, Expr)> = Vec::new();
    let mut outputs: Option<Vec<usize>> = None;
    let mut outputs_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let body = content.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("outputs:") {
            if outputs.is_some() {
                return Err(BnError::Syntax {
                    line,
                    column: indent + 1,
                    message: "repeated `outputs:` line".into(),
                });
            }
            let base = indent + "outputs:".len();
            let mut outs = Vec::new();
            let mut offset = 0;
            for word in rest.split_whitespace() {
                offset += rest[offset..].find(word).expect("word within rest");
                let column = base + offset + 1;
                offset += word.len();
                let v = word
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&v| v > 0)
                    .ok_or_else(|| BnError::Syntax {
                        line,
                        column,
                        message: format!("expected a variable like x3, found `{word}`"),
                    })?;
                outs.push(v);
            }
            outputs = Some(outs);
            outputs_line = line;
            continue;
        }
        let Some(eq) = body.find('=') else {
            return Err(BnError::Syntax {
                line,
                column: indent + 1,
                message: "expected `x<i> = <expr>` or `outputs: ...`".into(),
            });
        };
        let lhs = body[..eq].trim();
        let node = lhs
            .strip_prefix('x')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&v| v > 0)
            .ok_or_else(|| BnError::Syntax {
                line,
                column: indent + 1,
                message: format!("expected a node name like x3, found `{lhs}`"),
            })?;
        let expr = Expr::parse(&body[eq + 1..]).map_err(|e| BnError::Expr {
            line,
            source: ExprError {
                column: e.column + indent + eq + 1,
                message: e.message,
            },
        })?;
        rules.push((line, node, expr));
    }

    let n = rules.iter().map(|r| r.1).max().unwrap_or(0);
    if n == 0 {
        return Err(BnError::Invalid("no update rules".into()));
    }
    if n > MAX_NODES {
        return Err(BnError::TooLarge(n, MAX_NODES));
    }
    let mut slots: Vec<Option<(usize, Expr)>> = vec![None; n];
    for (line, node, expr) in rules {
        if slots[node - 1].is_some() {
            return Err(BnError::DuplicateNode { line, node });
        }
        slots[node - 1] = Some((line, expr));
    }
    let mut functions = Vec::with_capacity(n);
    let mut warnings = Vec::new();
    for (i, slot) in slots.into_iter().enumerate() {
        let node = i + 1;
        let (line, expr) = slot.ok_or(BnError::MissingNode(node))?;
        let vars = expr.vars();
        if let Some(&var) = vars.iter().find(|&&v| v > n) {
            return Err(BnError::UnknownVariable { line, var });
        }
        if vars.len() > MAX_ARITY {
            return Err(BnError::Arity {
                node,
                arity: vars.len(),
                limit: MAX_ARITY,
            });
        }
        let mut f = NodeFunction::from_expr(&expr, vars.into_iter().collect());
        let dropped = f.minimize();
        if !dropped.is_empty() {
            let names: Vec<String> = dropped.iter().map(|v| format!("x{v}")).collect();
            warnings.push(format!(
                "line {line}: x{node} does not depend on {}; input dropped",
                names.join(", ")
            ));
        }
        functions.push(f);
    }
    let outputs = outputs.ok_or(BnError::MissingOutputs)?;
    if let Some(&var) = outputs.iter().find(|&&v| v > n) {
        return Err(BnError::UnknownVariable { line: outputs_line, var });
    }
    Ok(ParsedNetwork {
        network: BooleanNetwork::new(functions, outputs)?,
        warnings,
    })
}
