//! Dense statevector and density-matrix simulation.
//!
//! Qubit `i` is bit `i` of a basis index (little-endian). Bitstrings shown to
//! users list qubit 0 first.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand::distr::Distribution;
use rand::distr::weighted::WeightedIndex;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::linalg::{CMatrix, apply_local};
use crate::scalar::Real;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 12;

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::config(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    Ok(())
}

fn check_targets(targets: &[usize], n: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n || targets[..i].contains(&t) {
            return Err(Error::usage(format!("invalid targets {targets:?} for {n} qubit(s)")));
        }
    }
    Ok(())
}

/// Operations shared by both state representations.
pub trait QuantumState<T: Real> {
    fn n_qubits(&self) -> usize;

    /// Applies `gate` in place.
    fn apply_gate(&mut self, gate: &GateOp) -> Result<()>;

    /// Born-rule outcome probabilities, indexed by basis state.
    fn probabilities(&self) -> Vec<T>;

    fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits() {
            return Err(Error::usage(format!(
                "circuit on {} qubits applied to a {}-qubit state",
                circuit.n_qubits(),
                self.n_qubits()
            )));
        }
        circuit.ops().iter().try_for_each(|op| self.apply_gate(op))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let mut amplitudes = vec![Complex::zero(); 1 << n];
        amplitudes[0] = Complex::one();
        Ok(Self { n_qubits: n, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut sv = Self::zero(n)?;
        if index >= sv.amplitudes.len() {
            return Err(Error::usage(format!("basis index {index} out of range")));
        }
        sv.amplitudes[0] = Complex::zero();
        sv.amplitudes[index] = Complex::one();
        Ok(sv)
    }

    /// Wraps raw amplitudes; the length must be a power of two. Not renormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::usage(format!("amplitude count {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_qubit_count(n)?;
        Ok(Self { n_qubits: n, amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::zero(), |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// `|self⟩⟨self|`.
    pub fn to_density(&self) -> DensityMatrix<T> {
        let a = &self.amplitudes;
        DensityMatrix {
            n_qubits: self.n_qubits,
            elements: CMatrix::from_fn(a.len(), |r, c| a[r] * a[c].conj()),
        }
    }
}

impl<T: Real> QuantumState<T> for StateVector<T> {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_local(&mut self.amplitudes, &gate.targets, &gate.kind.matrix());
        Ok(())
    }

    fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// `|+⟩^⊗n`.
pub fn init_plus_state<T: Real>(n: usize) -> Result<StateVector<T>> {
    check_qubit_count(n)?;
    let amp = T::lit(2.0).powf(-T::lit(n as f64) / T::lit(2.0));
    Ok(StateVector {
        n_qubits: n,
        amplitudes: vec![Complex::new(amp, T::zero()); 1 << n],
    })
}

/// Density matrix stored as a row-major `2^n × 2^n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n_qubits: usize,
    elements: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn zero(n: usize) -> Result<Self> {
        Ok(StateVector::zero(n)?.to_density())
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        let dim = 1usize << n;
        let w = Complex::new(T::one() / T::lit(dim as f64), T::zero());
        Ok(Self {
            n_qubits: n,
            elements: CMatrix::identity(dim).scale(w),
        })
    }

    /// Wraps a matrix; its dimension must be a power of two. No positivity check.
    pub fn from_matrix(elements: CMatrix<T>) -> Result<Self> {
        let dim = elements.dim();
        if !dim.is_power_of_two() {
            return Err(Error::usage(format!("dimension {dim} is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        check_qubit_count(n)?;
        Ok(Self { n_qubits: n, elements })
    }

    pub fn elements(&self) -> &CMatrix<T> {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements.dim()
    }

    pub fn trace(&self) -> T {
        self.elements.trace().re
    }

    /// `self ⊗ |0⟩⟨0|` with the new qubit appended as the most significant one.
    pub fn with_ancilla(&self) -> Result<Self> {
        check_qubit_count(self.n_qubits + 1)?;
        let zero = CMatrix::from_rows(&[
            vec![Complex::one(), Complex::zero()],
            vec![Complex::zero(), Complex::zero()],
        ]);
        Ok(Self {
            n_qubits: self.n_qubits + 1,
            elements: zero.kron(&self.elements),
        })
    }

    /// Applies an arbitrary local operator `K` as `ρ → K ρ K†`.
    ///
    /// Rows of the flat array occupy the high `n` bits, columns the low `n`, so
    /// `K` acts on the row qubits and `K*` on the column qubits.
    fn sandwich_local(&mut self, targets: &[usize], op: &CMatrix<T>) {
        let n = self.n_qubits;
        let row_targets: Vec<usize> = targets.iter().map(|&t| t + n).collect();
        let data = self.elements.as_mut_slice();
        apply_local(data, &row_targets, op);
        apply_local(data, targets, &op.conj());
    }

    /// `ρ → Σ_k K_k ρ K_k†` on `targets`.
    pub fn apply_channel(&mut self, channel: &KrausChannel<T>, targets: &[usize]) -> Result<()> {
        if targets.len() != channel.arity() {
            return Err(Error::usage(format!(
                "{}-qubit channel applied to {} target(s)",
                channel.arity(),
                targets.len()
            )));
        }
        check_targets(targets, self.n_qubits)?;

        if let [single] = channel.operators() {
            self.sandwich_local(targets, single);
            return Ok(());
        }
        let mut acc = CMatrix::zeros(self.dim());
        for k in channel.operators() {
            let mut branch = self.clone();
            branch.sandwich_local(targets, k);
            acc = acc.add(&branch.elements);
        }
        self.elements = acc;
        Ok(())
    }

    /// Returns `(MρM / Tr[MρM], Tr[MρM])` for an orthogonal projector `M`.
    pub fn project_and_renormalize(&self, projector: &CMatrix<T>) -> Result<(Self, T)> {
        if projector.dim() != self.dim() {
            return Err(Error::usage(format!(
                "projector dimension {} does not match state dimension {}",
                projector.dim(),
                self.dim()
            )));
        }
        let tol = T::check_tolerance();
        if !projector.is_hermitian(tol) || !projector.is_idempotent(tol) {
            return Err(Error::usage("projector must be Hermitian and idempotent"));
        }
        let projected = &(projector * &self.elements) * projector;
        let retention = projected.trace().re;
        if retention <= T::empty_threshold() {
            return Err(Error::EmptyPostselection(retention.as_f64()));
        }
        let inv = Complex::new(T::one() / retention, T::zero());
        Ok((
            Self {
                n_qubits: self.n_qubits,
                elements: projected.scale(inv),
            },
            retention,
        ))
    }

    /// Traces out the most significant qubit.
    pub fn partial_trace_last_qubit(&self) -> Result<Self> {
        if self.n_qubits < 2 {
            return Err(Error::usage("partial trace needs at least two qubits"));
        }
        let half = self.dim() / 2;
        let e = &self.elements;
        Ok(Self {
            n_qubits: self.n_qubits - 1,
            elements: CMatrix::from_fn(half, |r, c| e[(r, c)] + e[(r + half, c + half)]),
        })
    }

    /// Projects the most significant qubit onto `|0⟩`, renormalizes, and traces it out.
    pub fn postselect_last_qubit_zero(&self) -> Result<(Self, T)> {
        if self.n_qubits < 2 {
            return Err(Error::usage("postselection needs an ancilla plus at least one qubit"));
        }
        let half = self.dim() / 2;
        let e = &self.elements;
        let retention: T = (0..half).map(|i| e[(i, i)].re).sum();
        if retention <= T::empty_threshold() {
            return Err(Error::EmptyPostselection(retention.as_f64()));
        }
        let inv = T::one() / retention;
        Ok((
            Self {
                n_qubits: self.n_qubits - 1,
                elements: CMatrix::from_fn(half, |r, c| e[(r, c)] * inv),
            },
            retention,
        ))
    }

    /// `⟨ψ|ρ|ψ⟩`, clamped to `[0, 1]`.
    pub fn fidelity_pure(&self, target: &StateVector<T>) -> Result<T> {
        if target.amplitudes.len() != self.dim() {
            return Err(Error::usage(format!(
                "target dimension {} does not match state dimension {}",
                target.amplitudes.len(),
                self.dim()
            )));
        }
        let psi = &target.amplitudes;
        let dim = self.dim();
        let data = self.elements.as_slice();
        let mut acc = Complex::<T>::zero();
        for r in 0..dim {
            let row = &data[r * dim..(r + 1) * dim];
            let row_dot = row.iter().zip(psi).fold(Complex::zero(), |a, (&m, &p)| a + m * p);
            acc = acc + psi[r].conj() * row_dot;
        }
        Ok(acc.re.max(T::zero()).min(T::one()))
    }
}

impl<T: Real> QuantumState<T> for DensityMatrix<T> {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.sandwich_local(&gate.targets, &gate.kind.matrix());
        Ok(())
    }

    fn probabilities(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.elements[(i, i)].re.max(T::zero())).collect()
    }
}

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T: Real> {
    operators: Vec<CMatrix<T>>,
    arity: usize,
}

impl<T: Real> KrausChannel<T> {
    /// Validates shape and completeness `Σ K†K = I`.
    pub fn new(operators: Vec<CMatrix<T>>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::config("channel needs at least one Kraus operator"));
        };
        let dim = first.dim();
        let arity = match dim {
            2 => 1,
            4 => 2,
            _ => return Err(Error::config(format!("Kraus operator dimension {dim} is not 2 or 4"))),
        };
        if operators.iter().any(|k| k.dim() != dim) {
            return Err(Error::config("Kraus operators differ in dimension"));
        }
        let sum = operators
            .iter()
            .fold(CMatrix::zeros(dim), |acc, k| acc.add(&(&k.adjoint() * k)));
        if !sum.approx_eq(&CMatrix::identity(dim), T::check_tolerance()) {
            return Err(Error::config("Kraus operators are not trace preserving (Σ K†K ≠ I)"));
        }
        Ok(Self { operators, arity })
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            operators: vec![CMatrix::identity(1 << arity)],
            arity,
        }
    }

    pub fn operators(&self) -> &[CMatrix<T>] {
        &self.operators
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::usage("cannot compose channels of different arity"));
        }
        let ops = other
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Self::new(ops)
    }
}

/// Measurement record: basis index → number of shots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    n_qubits: usize,
    counts: BTreeMap<usize, u64>,
}

impl Counts {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_map(n_qubits: usize, counts: BTreeMap<usize, u64>) -> Result<Self> {
        if let Some((&idx, _)) = counts.iter().next_back() {
            if idx >> n_qubits != 0 {
                return Err(Error::usage(format!("outcome {idx} out of range for {n_qubits} qubits")));
            }
        }
        Ok(Self { n_qubits, counts })
    }

    /// Parses `{"010": 3, ...}` style records (qubit 0 first).
    pub fn from_bitstrings<'a>(entries: impl IntoIterator<Item = (&'a str, u64)>) -> Result<Self> {
        let mut n = None;
        let mut counts = BTreeMap::new();
        for (bits, c) in entries {
            if *n.get_or_insert(bits.len()) != bits.len() {
                return Err(Error::usage("bitstrings of different lengths"));
            }
            *counts.entry(parse_bitstring(bits)?).or_insert(0) += c;
        }
        Ok(Self {
            n_qubits: n.unwrap_or(0),
            counts,
        })
    }

    pub fn add(&mut self, index: usize, shots: u64) {
        *self.counts.entry(index).or_insert(0) += shots;
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.shots() == 0
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts.get(&index).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Empirical frequencies as a dense vector of length `2^n`.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.shots() as f64;
        let mut out = vec![0.0; 1 << self.n_qubits];
        for (k, v) in self.iter() {
            out[k] = v as f64 / total;
        }
        out
    }

    pub fn to_bitstring_map(&self) -> BTreeMap<String, u64> {
        self.iter().map(|(k, v)| (format_bitstring(k, self.n_qubits), v)).collect()
    }
}

impl Serialize for Counts {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_bitstring_map().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Counts {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, u64>::deserialize(d)?;
        Counts::from_bitstrings(map.iter().map(|(k, &v)| (k.as_str(), v))).map_err(serde::de::Error::custom)
    }
}

/// Renders a basis index with qubit 0 first.
pub fn format_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits).map(|q| if (index >> q) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Inverse of [`format_bitstring`].
pub fn parse_bitstring(bits: &str) -> Result<usize> {
    bits.chars().enumerate().try_fold(0usize, |acc, (q, ch)| match ch {
        '0' => Ok(acc),
        '1' => Ok(acc | (1 << q)),
        other => Err(Error::usage(format!("invalid bit {other:?} in {bits:?}"))),
    })
}

/// Draws `shots` samples from `probs` with a ChaCha8 stream seeded by `seed`.
pub fn sample_counts(probs: &[f64], shots: u64, seed: u64) -> Result<Counts> {
    let len = probs.len();
    if !len.is_power_of_two() {
        return Err(Error::usage(format!("distribution length {len} is not a power of two")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-6 || probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::usage(format!("not a probability vector (sum {total})")));
    }
    let mut counts = Counts::new(len.trailing_zeros() as usize);
    if shots == 0 {
        return Ok(counts);
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::usage(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dense = vec![0u64; len];
    for _ in 0..shots {
        dense[dist.sample(&mut rng)] += 1;
    }
    for (k, v) in dense.into_iter().enumerate().filter(|&(_, v)| v > 0) {
        counts.add(k, v);
    }
    Ok(counts)
}
