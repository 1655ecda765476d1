//! Lowering to the {CX, one-qubit} basis, routing on a linear chain, and CX accounting.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::{GateKind, GateOp};
use crate::maxcut::Graph;

/// Physical connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMap {
    AllToAll,
    /// Chain `0 - 1 - … - (len-1)`.
    LinearChain(usize),
}

impl CouplingMap {
    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        match self {
            CouplingMap::AllToAll => a != b,
            CouplingMap::LinearChain(len) => a < *len && b < *len && a.abs_diff(b) == 1,
        }
    }
}

/// Toffoli with controls `c1`, `c2` and target `t`, as the usual 6-CX network
/// with T/T† realized as `RZ(±π/4)` (equal up to global phase).
fn toffoli(c1: usize, c2: usize, t: usize) -> Vec<GateOp> {
    let tg = |q| GateOp::rz(q, FRAC_PI_4);
    let tdg = |q| GateOp::rz(q, -FRAC_PI_4);
    vec![
        GateOp::h(t),
        GateOp::cx(c2, t),
        tdg(t),
        GateOp::cx(c1, t),
        tg(t),
        GateOp::cx(c2, t),
        tdg(t),
        GateOp::cx(c1, t),
        tg(c2),
        tg(t),
        GateOp::h(t),
        GateOp::cx(c1, c2),
        tg(c1),
        tdg(c2),
        GateOp::cx(c1, c2),
    ]
}

/// Basis-gate expansion of a single op.
pub fn decompose_op(op: &GateOp) -> Vec<GateOp> {
    let t = &op.targets;
    match op.kind {
        GateKind::H | GateKind::X | GateKind::Rx(_) | GateKind::Rz(_) | GateKind::Cx => vec![op.clone()],
        GateKind::Rzz(theta) => vec![GateOp::cx(t[0], t[1]), GateOp::rz(t[1], theta), GateOp::cx(t[0], t[1])],
        GateKind::Swap => vec![GateOp::cx(t[0], t[1]), GateOp::cx(t[1], t[0]), GateOp::cx(t[0], t[1])],
        GateKind::Cswap => {
            let (c, a, b) = (t[0], t[1], t[2]);
            let mut ops = vec![GateOp::cx(b, a)];
            ops.extend(toffoli(c, a, b));
            ops.push(GateOp::cx(b, a));
            ops
        }
    }
}

/// RZZ → 2 CX, SWAP → 3 CX, CSWAP → 8 CX; everything else passes through.
pub fn decompose_to_cx_basis(circ: &Circuit) -> Result<Circuit> {
    let mut out = match circ.ancilla() {
        Some(a) => Circuit::with_ancilla(circ.n_qubits(), a)?,
        None => Circuit::new(circ.n_qubits()),
    };
    for op in circ.ops() {
        out.extend(decompose_op(op))?;
    }
    Ok(out)
}

pub fn is_basis_gate(kind: &GateKind) -> bool {
    matches!(kind, GateKind::H | GateKind::X | GateKind::Rx(_) | GateKind::Rz(_) | GateKind::Cx)
}

/// Logical-to-physical placement on a chain: `positions[logical] = physical`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    positions: Vec<usize>,
}

impl Layout {
    pub fn new(positions: Vec<usize>) -> Result<Self> {
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != positions.len() {
            return Err(Error::config(format!("layout {positions:?} repeats a physical qubit")));
        }
        Ok(Self { positions })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            positions: (0..n).collect(),
        }
    }

    /// Default placement: the highest-degree node (lowest index on ties) sits at
    /// chain position 1, the remaining nodes fill the other positions in
    /// ascending order, and any extra logical qubits (ancillas) follow.
    ///
    /// For the 4-node star this puts the center second on the chain, so one
    /// layer needs exactly one SWAP.
    pub fn default_for(g: &Graph, n_logical: usize) -> Self {
        let n = g.n_nodes();
        if n < 2 {
            return Self::identity(n_logical);
        }
        let hub = (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v))).unwrap_or(0);
        let mut positions = vec![0; n_logical];
        positions[hub] = 1;
        let mut free = (0..n_logical).filter(|&p| p != 1);
        for (v, slot) in positions.iter_mut().enumerate() {
            if v != hub {
                *slot = free.next().expect("enough positions");
            }
        }
        Self { positions }
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Output of [`route_linear`].
#[derive(Clone, Debug, PartialEq)]
pub struct RoutedCircuit {
    /// Circuit on physical chain positions.
    pub circuit: Circuit,
    /// Where each logical qubit ends up; read measurement results through this.
    pub final_layout: Layout,
    pub swaps_inserted: usize,
}

/// Greedy router for a linear chain of `chain_len` qubits.
///
/// Three-qubit gates are lowered first. Before each two-qubit gate whose
/// operands are not neighbours, the first operand is swapped one step at a
/// time toward the second; the logical→physical map is updated and never
/// restored (measurements are relabeled instead).
pub fn route_linear(circ: &Circuit, chain_len: usize, layout: &Layout) -> Result<RoutedCircuit> {
    let n = circ.n_qubits();
    if chain_len < n {
        return Err(Error::config(format!("chain of {chain_len} qubits cannot hold {n} logical qubits")));
    }
    if layout.len() != n || layout.positions().iter().any(|&p| p >= chain_len) {
        return Err(Error::config(format!(
            "layout {:?} does not place {n} qubits on a {chain_len}-qubit chain",
            layout.positions()
        )));
    }
    let lowered;
    let circ = if circ.ops().iter().any(|op| op.kind.arity() > 2) {
        lowered = decompose_to_cx_basis(circ)?;
        &lowered
    } else {
        circ
    };

    let mut l2p = layout.positions().to_vec();
    let mut p2l: Vec<Option<usize>> = vec![None; chain_len];
    for (l, &p) in l2p.iter().enumerate() {
        p2l[p] = Some(l);
    }
    let mut out = Circuit::new(chain_len);
    let mut swaps = 0;
    for op in circ.ops() {
        if op.is_two_qubit() {
            let (a, b) = (op.targets[0], op.targets[1]);
            while l2p[a].abs_diff(l2p[b]) > 1 {
                let from = l2p[a];
                let to = if l2p[b] > from { from + 1 } else { from - 1 };
                out.push(GateOp::swap(from, to))?;
                swaps += 1;
                let other = p2l[to];
                p2l.swap(from, to);
                l2p[a] = to;
                if let Some(o) = other {
                    l2p[o] = from;
                }
            }
        }
        out.push(GateOp {
            kind: op.kind,
            targets: op.targets.iter().map(|&l| l2p[l]).collect(),
        })?;
    }
    Ok(RoutedCircuit {
        circuit: out,
        final_layout: Layout { positions: l2p },
        swaps_inserted: swaps,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCountReport {
    pub cx_count: usize,
    pub single_qubit_count: usize,
    /// Greedy ASAP layering depth.
    pub depth: usize,
}

/// Counts a circuit that is already in the {CX, one-qubit} basis.
pub fn count_report(circ: &Circuit) -> Result<GateCountReport> {
    let mut report = GateCountReport::default();
    let mut frontier = vec![0usize; circ.n_qubits()];
    for op in circ.ops() {
        if !is_basis_gate(&op.kind) {
            return Err(Error::usage(format!("{} is not a basis gate; decompose first", op.kind.name())));
        }
        if op.kind == GateKind::Cx {
            report.cx_count += 1;
        } else {
            report.single_qubit_count += 1;
        }
        let layer = op.targets.iter().map(|&q| frontier[q]).max().unwrap_or(0) + 1;
        for &q in &op.targets {
            frontier[q] = layer;
        }
        report.depth = report.depth.max(layer);
    }
    Ok(report)
}

/// `with_sv.cx_count / base.cx_count`.
pub fn relative_overhead(with_sv: &GateCountReport, base: &GateCountReport) -> Result<f64> {
    if base.cx_count == 0 {
        return Err(Error::usage("baseline circuit has no CX gates"));
    }
    Ok(with_sv.cx_count as f64 / base.cx_count as f64)
}
