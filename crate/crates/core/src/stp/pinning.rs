//! Pinning controllers that make a Boolean network follow a control plan.
//!
//! A pinned node keeps its own rule `f_i` and gains an input
//! `u_i = g_i(...)` combined through a binary operator: the new rule is
//! `g_i ⊕_i f_i`. The design asks for `g_i ⊕_i f_i` to equal the assigned
//! in-neighbor (or its negation), so the pinned network's dependency graph is
//! the plan's result graph.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::matrix::{
    bool_index, canonical_bit, delete_factor, power_reducing, structure_matrix_of, swap, DenseMatrix,
    LogicalMatrix,
};
use crate::boolnet::{BnError, BooleanNetwork, NodeFunction};
use crate::realize::ControlPlan;

/// Largest original in-degree accepted by [`design_pinning`].
pub const MAX_PIN_INDEGREE: usize = 20;

/// Widest `g` for which the equation is also checked with dense matrices.
const DENSE_CHECK_WIDTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PinError {
    #[error("node x{node} has in-degree {k}, above the limit of {limit}")]
    InDegree { node: usize, k: usize, limit: usize },
    #[error("no operator solves the pinning equation for x{0}")]
    Unsolvable(usize),
    #[error("plan does not fit the network: {0}")]
    PlanMismatch(String),
    #[error("pinned rule of x{0} does not reduce to its assigned input")]
    Verification(usize),
    #[error(transparent)]
    Network(#[from] BnError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    #[default]
    Identity,
    Negation,
}

impl Polarity {
    pub fn matrix(self) -> LogicalMatrix {
        match self {
            Polarity::Identity => LogicalMatrix::identity(2),
            Polarity::Negation => LogicalMatrix::negation(),
        }
    }

    fn apply(self, x: bool) -> bool {
        x ^ (self == Polarity::Negation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PinType {
    /// The assigned input is not among the original inputs.
    I,
    /// The assigned input is already an original input.
    II,
    /// The node had no inputs.
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    And,
    Or,
    Xor,
}

impl Operator {
    const ALL: [Operator; 3] = [Operator::And, Operator::Or, Operator::Xor];

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Operator::And => a && b,
            Operator::Or => a || b,
            Operator::Xor => a ^ b,
        }
    }

    /// 2 × 4 structure matrix, first argument most significant.
    pub fn matrix(self) -> LogicalMatrix {
        let cols = [(true, true), (true, false), (false, true), (false, false)]
            .map(|(a, b)| bool_index(self.apply(a, b)));
        LogicalMatrix::new(2, cols.to_vec())
    }

    /// A value `g` with `g ⊕ f = target`, if one exists. Prefers `g = target`.
    fn solve(self, f: bool, target: bool) -> Option<bool> {
        [target, !target].into_iter().find(|&g| self.apply(g, f) == target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PinnedNode {
    pub node: usize,
    /// The assigned in-neighbor the node must copy.
    pub target: usize,
    pub kind: PinType,
    /// Original in-degree.
    pub k: usize,
    /// 1-based position of `target` among the inputs of `g`, absent for type III.
    pub iota: Option<usize>,
    pub polarity: Polarity,
    pub operator: Operator,
    /// Inputs of `g` in ascending order.
    pub g_inputs: Vec<usize>,
    pub m_oplus: LogicalMatrix,
    pub m_g: LogicalMatrix,
    /// Pinned rule `g ⊕ f` as derived from the matrices, over `g_inputs`.
    #[serde(serialize_with = "table_bits")]
    pub realized: Vec<bool>,
    /// The realized rule with inessential inputs removed.
    pub realized_expr: String,
}

fn table_bits<S: serde::Serializer>(t: &[bool], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PinningPlan {
    pub controlled: Vec<usize>,
    pub nodes: Vec<PinnedNode>,
    #[serde(skip)]
    pub network: BooleanNetwork,
}

impl PinnedNode {
    /// Left-hand side of the pinning equation without `M_⊕ M_g`: maps the
    /// canonical input `z` of `g` to `z ⋉ f`.
    pub fn lhs_operand(&self, f: &NodeFunction) -> LogicalMatrix {
        let m_f = structure_matrix_of(f);
        match self.kind {
            PinType::I => {
                let count = self.k + 1;
                let inner = m_f.mul(&delete_factor(self.iota.expect("type I has a position"), count));
                LogicalMatrix::identity(1 << count).kron(&inner).mul(&power_reducing(1 << count))
            }
            PinType::II => {
                let size = 1 << self.k;
                LogicalMatrix::identity(size).kron(&m_f).mul(&power_reducing(size))
            }
            PinType::III => LogicalMatrix::identity(2).kron(&m_f),
        }
    }

    /// Right-hand side: picks the target out of `z` and applies the polarity.
    pub fn rhs(&self) -> LogicalMatrix {
        let a = self.polarity.matrix();
        match self.kind {
            PinType::III => a,
            _ => {
                let width = self.g_inputs.len();
                let before = 1 << (self.iota.expect("types I and II have a position") - 1);
                let front = swap(before, 2).kron(&LogicalMatrix::identity(1 << (width - self.iota.unwrap())));
                a.kron(&LogicalMatrix::ones_row(1 << (width - 1))).mul(&front)
            }
        }
    }

    /// `M_⊕ ⋉ M_g ⋉ lhs_operand - rhs`, computed with dense matrices.
    pub fn residual(&self, f: &NodeFunction) -> DenseMatrix {
        let lhs = self
            .m_oplus
            .to_dense()
            .stp(&self.m_g.to_dense())
            .stp(&self.lhs_operand(f).to_dense());
        lhs.sub(&self.rhs().to_dense())
    }
}

/// Design a pinning controller for every node in `plan`. Nodes missing from
/// `polarity` use [`Polarity::Identity`].
pub fn design_pinning(
    bn: &BooleanNetwork,
    plan: &ControlPlan,
    polarity: &BTreeMap<usize, Polarity>,
) -> Result<PinningPlan, PinError> {
    if plan.result.n() != bn.n() {
        return Err(PinError::PlanMismatch(format!(
            "plan has {} vertices, network has {}",
            plan.result.n(),
            bn.n()
        )));
    }
    let mut nodes = Vec::with_capacity(plan.assignment.len());
    let mut functions = bn.functions().to_vec();
    for (&node, &target) in &plan.assignment {
        if node == 0 || node > bn.n() || target == 0 || target > bn.n() {
            return Err(PinError::PlanMismatch(format!("x{node} <- x{target} out of range")));
        }
        let pin = design_node(bn.function(node), node, target, polarity.get(&node).copied().unwrap_or_default())?;
        functions[node - 1] = NodeFunction {
            inputs: vec![target],
            table: vec![pin.polarity.apply(false), pin.polarity.apply(true)],
        };
        nodes.push(pin);
    }
    let network = BooleanNetwork::new(functions, bn.outputs().to_vec())?;
    Ok(PinningPlan {
        controlled: plan.controlled.clone(),
        nodes,
        network,
    })
}

fn design_node(f: &NodeFunction, node: usize, target: usize, polarity: Polarity) -> Result<PinnedNode, PinError> {
    let k = f.arity();
    if k > MAX_PIN_INDEGREE {
        return Err(PinError::InDegree {
            node,
            k,
            limit: MAX_PIN_INDEGREE,
        });
    }
    let (kind, g_inputs) = if k == 0 {
        (PinType::III, vec![target])
    } else if f.inputs.contains(&target) {
        (PinType::II, f.inputs.clone())
    } else {
        let mut v = f.inputs.clone();
        v.push(target);
        v.sort_unstable();
        (PinType::I, v)
    };
    let width = g_inputs.len();
    let pos = g_inputs.iter().position(|&v| v == target).expect("target is an input of g");
    let iota = (kind != PinType::III).then_some(pos + 1);

    // Values of f and of the target for every canonical column of z.
    let columns: Vec<(bool, bool)> = (0..1usize << width)
        .map(|c| {
            let value = |v: usize| canonical_bit(c, g_inputs.iter().position(|&w| w == v).unwrap() + 1, width);
            let row = f
                .inputs
                .iter()
                .enumerate()
                .fold(0usize, |acc, (b, &v)| acc | usize::from(value(v)) << b);
            (f.table[row], polarity.apply(value(target)))
        })
        .collect();

    let candidates: &[Operator] = match kind {
        // f is constant, so g is the target itself and the operator must let it through
        PinType::III if f.table[0] => &[Operator::And],
        PinType::III => &[Operator::Or],
        _ => &Operator::ALL,
    };
    let (operator, g) = candidates
        .iter()
        .find_map(|&op| {
            let g: Option<Vec<usize>> = columns
                .iter()
                .map(|&(fv, t)| op.solve(fv, t).map(bool_index))
                .collect();
            g.map(|g| (op, g))
        })
        .ok_or(PinError::Unsolvable(node))?;

    let m_oplus = operator.matrix();
    let m_g = LogicalMatrix::new(2, g);
    let mut pin = PinnedNode {
        node,
        target,
        kind,
        k,
        iota,
        polarity,
        operator,
        g_inputs,
        m_oplus,
        m_g,
        realized: Vec::new(),
        realized_expr: String::new(),
    };

    let operand = pin.lhs_operand(f);
    let realized_matrix = pin.m_oplus.stp(&pin.m_g).stp(&operand);
    if realized_matrix != pin.rhs() || (width <= DENSE_CHECK_WIDTH && !pin.residual(f).is_zero()) {
        return Err(PinError::Unsolvable(node));
    }
    // truth table in row order (bit b of the row holds g_inputs[b])
    pin.realized = (0..1usize << width)
        .map(|row| {
            let c = (0..width).fold(0, |acc, b| acc * 2 + usize::from(row >> b & 1 == 0));
            realized_matrix.columns()[c] == 0
        })
        .collect();
    let mut reduced = NodeFunction {
        inputs: pin.g_inputs.clone(),
        table: pin.realized.clone(),
    };
    reduced.minimize();
    let expected = [polarity.apply(false), polarity.apply(true)];
    if reduced.inputs != [target] || reduced.table != expected {
        return Err(PinError::Verification(node));
    }
    pin.realized_expr = reduced.to_expr_string();
    Ok(pin)
}
