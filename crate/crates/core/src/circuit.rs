use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::scalar::Real;
use crate::state::{QuantumState, StateVector};

/// Ordered gate list on `n_qubits`, optionally with one ancilla.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
    ancilla: Option<usize>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
            ancilla: None,
        }
    }

    pub fn with_ancilla(n_qubits: usize, ancilla: usize) -> Result<Self> {
        if ancilla >= n_qubits {
            return Err(Error::usage(format!("ancilla {ancilla} outside {n_qubits} qubit(s)")));
        }
        Ok(Self {
            n_qubits,
            ops: Vec::new(),
            ancilla: Some(ancilla),
        })
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<()> {
        ops.into_iter().try_for_each(|op| self.push(op))
    }

    /// Appends `other`, which must not be wider than `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::usage("appended circuit is wider than the target circuit"));
        }
        self.extend(other.ops.iter().cloned())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn ancilla(&self) -> Option<usize> {
        self.ancilla
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Runs the circuit on `|0…0⟩`.
    pub fn simulate<T: Real>(&self) -> Result<StateVector<T>> {
        let mut state = StateVector::zero(self.n_qubits)?;
        state.apply_circuit(self)?;
        Ok(state)
    }
}
