//! Readout (assignment) errors and their mitigation through the calibration matrix.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Counts, MAX_QUBITS, sample_counts};

/// Condition number above which mitigation logs a warning.
pub const CONDITION_WARNING: f64 = 1e6;

/// Per-qubit assignment error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutError {
    /// Pr(read 1 | prepared 0)
    pub p01: f64,
    /// Pr(read 0 | prepared 1)
    pub p10: f64,
}

impl ReadoutError {
    pub fn symmetric(eps: f64) -> Self {
        Self { p01: eps, p10: eps }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p01) || !(0.0..=1.0).contains(&self.p10) {
            return Err(Error::config(format!("readout error {self:?} outside [0, 1]")));
        }
        Ok(())
    }
}

/// Column-stochastic `m[(read, true)] = Pr(read | true)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationMatrix {
    m: DMatrix<f64>,
}

impl CalibrationMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn n_qubits(&self) -> usize {
        self.m.nrows().trailing_zeros() as usize
    }

    /// `m · probs`.
    pub fn apply(&self, probs: &[f64]) -> Result<Vec<f64>> {
        if probs.len() != self.m.ncols() {
            return Err(Error::usage(format!(
                "distribution of length {} against a {}×{} calibration matrix",
                probs.len(),
                self.m.nrows(),
                self.m.ncols()
            )));
        }
        Ok((&self.m * DVector::from_column_slice(probs)).iter().copied().collect())
    }

    /// Ratio of extreme singular values (infinite if singular).
    pub fn condition_number(&self) -> f64 {
        let sv = self.m.singular_values();
        let max = sv.max();
        let min = sv.min();
        if min <= 0.0 { f64::INFINITY } else { max / min }
    }
}

/// Tensor product of the per-qubit 2×2 assignment matrices; qubit `q` is bit `q`.
pub fn build_calibration_matrix(readout: &[ReadoutError], n: usize) -> Result<CalibrationMatrix> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::config(format!("calibration needs 1..={MAX_QUBITS} qubits, got {n}")));
    }
    if readout.len() != n {
        return Err(Error::config(format!("{} readout entries for {n} qubits", readout.len())));
    }
    readout.iter().try_for_each(ReadoutError::validate)?;
    let dim = 1usize << n;
    let m = DMatrix::from_fn(dim, dim, |read, truth| {
        readout
            .iter()
            .enumerate()
            .map(|(q, e)| match ((truth >> q) & 1, (read >> q) & 1) {
                (0, 0) => 1.0 - e.p01,
                (0, _) => e.p01,
                (_, 0) => e.p10,
                _ => 1.0 - e.p10,
            })
            .product()
    });
    Ok(CalibrationMatrix { m })
}

/// Samples `shots` readouts of a state with outcome distribution `probs`.
pub fn apply_readout_error(probs: &[f64], cal: &CalibrationMatrix, shots: u64, seed: u64) -> Result<Counts> {
    let observed = cal.apply(probs)?;
    let total: f64 = observed.iter().sum();
    let observed: Vec<f64> = observed.iter().map(|p| (p / total).max(0.0)).collect();
    sample_counts(&observed, shots, seed)
}

/// Least-squares solve of `cal · q = frequencies`, then clip negatives and renormalize.
pub fn mitigate_counts(counts: &Counts, cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    if counts.is_empty() {
        return Err(Error::usage("cannot mitigate an empty measurement record"));
    }
    if counts.n_qubits() != cal.n_qubits() {
        return Err(Error::usage(format!(
            "{}-qubit counts against a {}-qubit calibration",
            counts.n_qubits(),
            cal.n_qubits()
        )));
    }
    mitigate_distribution(&counts.frequencies(), cal)
}

/// [`mitigate_counts`] on an explicit frequency vector.
pub fn mitigate_distribution(freqs: &[f64], cal: &CalibrationMatrix) -> Result<Vec<f64>> {
    let svd = cal.m.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin.is_nan() || smin <= 1e-12 * smax {
        return Err(Error::config("calibration matrix is singular"));
    }
    let cond = smax / smin;
    if cond > CONDITION_WARNING {
        log::warn!("calibration matrix is ill-conditioned (condition number {cond:.3e})");
    }
    if freqs.len() != cal.m.ncols() {
        return Err(Error::usage("frequency vector does not match calibration dimension"));
    }
    let b = DVector::from_column_slice(freqs);
    let q = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::config(format!("calibration solve failed: {e}")))?;
    let clipped: Vec<f64> = q.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::config("mitigated distribution vanished after clipping"));
    }
    Ok(clipped.into_iter().map(|v| v / total).collect())
}

/// Total-variation distance `½ Σ |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
