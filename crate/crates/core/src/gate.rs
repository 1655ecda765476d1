//! Gate set and the matrices that realize it.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Gate kinds. Angles are in radians.
///
/// Rotations follow `R_P(θ) = exp(-i θ/2 P)`; `Rzz` is `exp(-i θ/2 Z⊗Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "gate", content = "angle")]
pub enum GateKind {
    H,
    X,
    Rx(f64),
    Rz(f64),
    Rzz(f64),
    Cx,
    Swap,
    Cswap,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Rx(_) | GateKind::Rz(_) => 1,
            GateKind::Rzz(_) | GateKind::Cx | GateKind::Swap => 2,
            GateKind::Cswap => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Rx(_) => "rx",
            GateKind::Rz(_) => "rz",
            GateKind::Rzz(_) => "rzz",
            GateKind::Cx => "cx",
            GateKind::Swap => "swap",
            GateKind::Cswap => "cswap",
        }
    }

    /// Local unitary; bit `b` of its index refers to `targets[b]`.
    ///
    /// `Cx` targets are `[control, target]`; `Cswap` targets are `[control, a, b]`.
    pub fn matrix<T: Real>(&self) -> CMatrix<T> {
        let zero = Complex::<T>::zero();
        let one = Complex::<T>::one();
        match *self {
            GateKind::H => {
                let h = T::FRAC_1_SQRT_2();
                CMatrix::from_rows(&[
                    vec![Complex::new(h, T::zero()), Complex::new(h, T::zero())],
                    vec![Complex::new(h, T::zero()), Complex::new(-h, T::zero())],
                ])
            }
            GateKind::X => CMatrix::from_rows(&[vec![zero, one], vec![one, zero]]),
            GateKind::Rx(theta) => {
                let half = T::lit(theta) / T::lit(2.0);
                let c = Complex::new(half.cos(), T::zero());
                let s = Complex::new(T::zero(), -half.sin());
                CMatrix::from_rows(&[vec![c, s], vec![s, c]])
            }
            GateKind::Rz(theta) => {
                let half = T::lit(theta) / T::lit(2.0);
                CMatrix::diagonal(&[Complex::from_polar(T::one(), -half), Complex::from_polar(T::one(), half)])
            }
            GateKind::Rzz(theta) => {
                let half = T::lit(theta) / T::lit(2.0);
                let even = Complex::from_polar(T::one(), -half);
                let odd = Complex::from_polar(T::one(), half);
                CMatrix::diagonal(&[even, odd, odd, even])
            }
            GateKind::Cx => CMatrix::permutation(4, |l| if l & 1 == 1 { l ^ 0b10 } else { l }),
            GateKind::Swap => CMatrix::permutation(4, |l| ((l & 1) << 1) | (l >> 1)),
            GateKind::Cswap => CMatrix::permutation(8, |l| {
                if l & 1 == 1 {
                    let a = (l >> 1) & 1;
                    let b = (l >> 2) & 1;
                    1 | (b << 1) | (a << 2)
                } else {
                    l
                }
            }),
        }
    }
}

/// One gate applied to specific qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateOp {
    /// Checked constructor: arity must match and targets must be distinct.
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        let op = Self { kind, targets };
        op.validate(usize::MAX)?;
        Ok(op)
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, targets: vec![q] }
    }

    pub fn x(q: usize) -> Self {
        Self { kind: GateKind::X, targets: vec![q] }
    }

    pub fn rx(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rx(theta), targets: vec![q] }
    }

    pub fn rz(q: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rz(theta), targets: vec![q] }
    }

    pub fn rzz(a: usize, b: usize, theta: f64) -> Self {
        Self { kind: GateKind::Rzz(theta), targets: vec![a, b] }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cx, targets: vec![control, target] }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Swap, targets: vec![a, b] }
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self { kind: GateKind::Cswap, targets: vec![control, a, b] }
    }

    /// Checks arity, distinctness, and that every target is below `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::usage(format!(
                "{} expects {} target(s), got {}",
                self.kind.name(),
                self.kind.arity(),
                self.targets.len()
            )));
        }
        for (i, &t) in self.targets.iter().enumerate() {
            if t >= n_qubits {
                return Err(Error::usage(format!(
                    "{} target {t} out of range for {n_qubits} qubit(s)",
                    self.kind.name()
                )));
            }
            if self.targets[..i].contains(&t) {
                return Err(Error::usage(format!("{} has repeated target {t}", self.kind.name())));
            }
        }
        Ok(())
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitary_defect(m: &CMatrix<f64>) -> f64 {
        (&m.adjoint() * m).max_abs_diff(&CMatrix::identity(m.dim()))
    }

    #[test]
    fn all_gates_are_unitary() {
        for kind in [
            GateKind::H,
            GateKind::X,
            GateKind::Rx(0.7),
            GateKind::Rz(-1.3),
            GateKind::Rzz(2.1),
            GateKind::Cx,
            GateKind::Swap,
            GateKind::Cswap,
        ] {
            assert!(unitary_defect(&kind.matrix::<f64>()) < 1e-14, "{kind:?}");
        }
    }

    #[test]
    fn constructor_rejects_bad_targets() {
        assert!(GateOp::new(GateKind::Cx, vec![1, 1]).is_err());
        assert!(GateOp::new(GateKind::H, vec![0, 1]).is_err());
        assert!(GateOp::new(GateKind::Cswap, vec![0, 1, 2]).is_ok());
        assert!(GateOp::cx(0, 3).validate(3).is_err());
    }
}
