//! Gate error channels and noisy density-matrix execution.
//!
//! Depolarizing noise uses the "replace with the maximally mixed state" form
//! `ρ → (1-p)ρ + p·I/2^k`. Rates quoted under other conventions (for example
//! the Pauli-error probability `3p/4`) must be converted before use.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateKind;
use crate::linalg::CMatrix;
use crate::readout::ReadoutError;
use crate::scalar::Real;
use crate::state::{DensityMatrix, KrausChannel, QuantumState};
use crate::transpile::decompose_to_cx_basis;

fn pauli<T: Real>(which: usize) -> CMatrix<T> {
    let o = Complex::new(T::zero(), T::zero());
    let l = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    match which {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_rows(&[vec![o, l], vec![l, o]]),
        2 => CMatrix::from_rows(&[vec![o, -i], vec![i, o]]),
        _ => CMatrix::from_rows(&[vec![l, o], vec![o, -l]]),
    }
}

/// `ρ → (1-p)ρ + p·I/2^arity` as a Kraus set: the identity weighted
/// `√(1 - (4^k-1)p/4^k)` plus every non-identity Pauli string weighted `√(p/4^k)`.
pub fn depolarizing_channel<T: Real>(p: T, arity: usize) -> Result<KrausChannel<T>> {
    if !(T::zero()..=T::one()).contains(&p) {
        return Err(Error::config(format!("depolarizing probability {p} outside [0, 1]")));
    }
    if !(1..=2).contains(&arity) {
        return Err(Error::config(format!("depolarizing arity {arity} not supported")));
    }
    if p == T::zero() {
        return Ok(KrausChannel::identity(arity));
    }
    let strings = 1usize << (2 * arity);
    let weight = p / T::lit(strings as f64);
    let id_weight = (T::one() - weight * T::lit((strings - 1) as f64)).max(T::zero());
    let ops = (0..strings)
        .filter_map(|s| {
            let w = if s == 0 { id_weight } else { weight };
            if w == T::zero() {
                return None;
            }
            let op = if arity == 1 { pauli::<T>(s) } else { pauli::<T>(s >> 2).kron(&pauli(s & 3)) };
            Some(op.scale(Complex::new(w.sqrt(), T::zero())))
        })
        .collect();
    KrausChannel::new(ops)
}

/// Amplitude damping with `γ = 1 - exp(-t/T1)` followed by pure dephasing that
/// brings the total coherence decay to `exp(-t/T2)`. Requires `T2 ≤ 2·T1`.
/// Infinite times are allowed and mean "no decay".
pub fn thermal_relaxation_channel<T: Real>(t1: T, t2: T, duration: T) -> Result<KrausChannel<T>> {
    if !(t1 > T::zero() && t2 > T::zero()) {
        return Err(Error::config(format!("coherence times must be positive (T1={t1}, T2={t2})")));
    }
    if duration.is_nan() || duration < T::zero() {
        return Err(Error::config(format!("gate duration {duration} must be nonnegative")));
    }
    if t2 > T::lit(2.0) * t1 {
        return Err(Error::config(format!("T2={t2} exceeds 2·T1={}", T::lit(2.0) * t1)));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let re = |x: T| Complex::new(x, T::zero());

    let gamma = T::one() - (-duration / t1).exp();
    // residual coherence factor left for pure dephasing
    let dephase = (-duration * (T::one() / t2 - T::one() / (T::lit(2.0) * t1))).exp().min(T::one());

    let damping = [
        CMatrix::from_rows(&[vec![re(T::one()), zero], vec![zero, re((T::one() - gamma).sqrt())]]),
        CMatrix::from_rows(&[vec![zero, re(gamma.sqrt())], vec![zero, zero]]),
    ];
    let keep = ((T::one() + dephase) / T::lit(2.0)).sqrt();
    let flip = ((T::one() - dephase) / T::lit(2.0)).max(T::zero()).sqrt();
    let dephasing = [pauli::<T>(0).scale(re(keep)), pauli::<T>(3).scale(re(flip))];

    let ops = dephasing
        .iter()
        .flat_map(|d| damping.iter().map(move |a| d * a))
        .filter(|k| k.as_slice().iter().any(|z| z.norm() > T::zero()))
        .collect();
    KrausChannel::new(ops)
}

/// Per-qubit value that may be given once for all qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerQubit {
    Uniform(f64),
    List(Vec<f64>),
}

impl PerQubit {
    pub fn get(&self, q: usize) -> Result<f64> {
        match self {
            PerQubit::Uniform(v) => Ok(*v),
            PerQubit::List(vs) => vs
                .get(q)
                .copied()
                .ok_or_else(|| Error::config(format!("no per-qubit value for qubit {q} (list has {})", vs.len()))),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            PerQubit::Uniform(v) => vec![*v],
            PerQubit::List(vs) => vs.clone(),
        }
    }

    fn scaled(&self, factor: f64) -> Self {
        match self {
            PerQubit::Uniform(v) => PerQubit::Uniform(v * factor),
            PerQubit::List(vs) => PerQubit::List(vs.iter().map(|v| v * factor).collect()),
        }
    }
}

/// Error rates attached to gates. Times are in seconds.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub p_depol_1q: f64,
    pub p_depol_2q: f64,
    pub t1: PerQubit,
    pub t2: PerQubit,
    pub dur_1q: f64,
    pub dur_2q: f64,
    /// Readout assignment errors per qubit; never applied by [`apply_noisy_circuit`].
    pub readout: Vec<ReadoutError>,
}

impl NoiseModel {
    /// All error sources switched off.
    pub fn noiseless() -> Self {
        Self {
            p_depol_1q: 0.0,
            p_depol_2q: 0.0,
            t1: PerQubit::Uniform(f64::INFINITY),
            t2: PerQubit::Uniform(f64::INFINITY),
            dur_1q: 35e-9,
            dur_2q: 300e-9,
            readout: Vec::new(),
        }
    }

    /// Representative superconducting-transmon rates (not tied to any device snapshot).
    pub fn representative() -> Self {
        Self {
            p_depol_1q: 3e-4,
            p_depol_2q: 8e-3,
            t1: PerQubit::Uniform(120e-6),
            t2: PerQubit::Uniform(80e-6),
            dur_1q: 35e-9,
            dur_2q: 300e-9,
            readout: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_depol_1q", self.p_depol_1q), ("p_depol_2q", self.p_depol_2q)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name}={p} outside [0, 1]")));
            }
        }
        if !(self.dur_1q > 0.0 && self.dur_2q > 0.0) {
            return Err(Error::config("gate durations must be positive"));
        }
        let t1s = self.t1.values();
        let t2s = self.t2.values();
        if t1s.iter().chain(&t2s).any(|&t| t.is_nan() || t <= 0.0) {
            return Err(Error::config("T1 and T2 must be positive"));
        }
        let width = t1s.len().max(t2s.len());
        for q in 0..width {
            let t1 = t1s[q.min(t1s.len() - 1)];
            let t2 = t2s[q.min(t2s.len() - 1)];
            if t2 > 2.0 * t1 {
                return Err(Error::config(format!("qubit {q}: T2={t2} exceeds 2·T1={}", 2.0 * t1)));
            }
        }
        for r in &self.readout {
            r.validate()?;
        }
        Ok(())
    }

    pub fn has_readout_error(&self) -> bool {
        self.readout.iter().any(|r| r.p01 > 0.0 || r.p10 > 0.0)
    }
}

/// Serialized form of [`NoiseModel`], with times in µs / ns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub p_depol_1q: f64,
    pub p_depol_2q: f64,
    pub t1_us: PerQubit,
    pub t2_us: PerQubit,
    pub dur_1q_ns: f64,
    pub dur_2q_ns: f64,
    #[serde(default)]
    pub readout: Vec<[f64; 2]>,
}

impl TryFrom<&NoiseConfig> for NoiseModel {
    type Error = Error;

    fn try_from(c: &NoiseConfig) -> Result<Self> {
        let nm = NoiseModel {
            p_depol_1q: c.p_depol_1q,
            p_depol_2q: c.p_depol_2q,
            t1: c.t1_us.scaled(1e-6),
            t2: c.t2_us.scaled(1e-6),
            dur_1q: c.dur_1q_ns * 1e-9,
            dur_2q: c.dur_2q_ns * 1e-9,
            readout: c.readout.iter().map(|&[p01, p10]| ReadoutError { p01, p10 }).collect(),
        };
        nm.validate()?;
        Ok(nm)
    }
}

impl From<&NoiseModel> for NoiseConfig {
    fn from(nm: &NoiseModel) -> Self {
        NoiseConfig {
            p_depol_1q: nm.p_depol_1q,
            p_depol_2q: nm.p_depol_2q,
            t1_us: nm.t1.scaled(1e6),
            t2_us: nm.t2.scaled(1e6),
            dur_1q_ns: nm.dur_1q * 1e9,
            dur_2q_ns: nm.dur_2q * 1e9,
            readout: nm.readout.iter().map(|r| [r.p01, r.p10]).collect(),
        }
    }
}

/// Runs `circ` on `initial` after lowering it to {CX, one-qubit}.
///
/// Every one-qubit gate is followed by depolarizing(`p_depol_1q`) and thermal
/// relaxation over `dur_1q` on its qubit; every CX by two-qubit
/// depolarizing(`p_depol_2q`) on its pair. Idle qubits see no noise and
/// readout error is not applied.
pub fn apply_noisy_circuit<T: Real>(
    circ: &Circuit,
    nm: &NoiseModel,
    initial: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    nm.validate()?;
    let n = circ.n_qubits();
    if initial.n_qubits() != n {
        return Err(Error::usage(format!(
            "{}-qubit circuit applied to a {}-qubit state",
            n,
            initial.n_qubits()
        )));
    }
    let lowered = decompose_to_cx_basis(circ)?;
    let depol_1q = depolarizing_channel(T::lit(nm.p_depol_1q), 1)?;
    let depol_2q = depolarizing_channel(T::lit(nm.p_depol_2q), 2)?;
    let relax = (0..n)
        .map(|q| {
            let ch = thermal_relaxation_channel(T::lit(nm.t1.get(q)?), T::lit(nm.t2.get(q)?), T::lit(nm.dur_1q))?;
            Ok((ch.operators().len() > 1).then_some(ch))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rho = initial.clone();
    for op in lowered.ops() {
        rho.apply_gate(op)?;
        match op.kind {
            GateKind::Cx => {
                if nm.p_depol_2q > 0.0 {
                    rho.apply_channel(&depol_2q, &op.targets)?;
                }
            }
            _ => {
                let q = op.targets[0];
                if nm.p_depol_1q > 0.0 {
                    rho.apply_channel(&depol_1q, &[q])?;
                }
                if let Some(ch) = &relax[q] {
                    rho.apply_channel(ch, &[q])?;
                }
            }
        }
    }
    Ok(rho)
}
