//! QAOA for MaxCut on small graphs, with exact state-vector and density-matrix
//! simulation, gate-level noise, symmetry-verification postselection, readout
//! mitigation and CX-count accounting for linear-chain hardware.
//!
//! Qubit `i` is bit `i` of a basis index. Bitstrings printed for humans list
//! qubit 0 first.

pub mod circuit;
pub mod error;
pub mod gate;
pub mod harness;
pub mod linalg;
pub mod maxcut;
pub mod nelder_mead;
pub mod noise;
pub mod qaoa;
pub mod readout;
pub mod scalar;
pub mod state;
pub mod symmetry;
pub mod transpile;

pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gate::{GateKind, GateOp};
pub use maxcut::{BenchmarkGraph, Graph, ObjectiveDiagonal, benchmark_graph};
pub use noise::{NoiseConfig, NoiseModel, apply_noisy_circuit, depolarizing_channel, thermal_relaxation_channel};
pub use qaoa::{
    OptimizedParams, OptimizerConfig, QaoaParams, SampleStats, build_qaoa_circuit, exact_expectation,
    optimize_parameters, sample_statistics,
};
pub use readout::{CalibrationMatrix, ReadoutError, build_calibration_matrix, mitigate_counts};
pub use scalar::Real;
pub use state::{Counts, QuantumState, init_plus_state, sample_counts};
pub use symmetry::{BitFlipSymmetry, PermutationSymmetry, SymmetryDescriptor};
pub use transpile::{CouplingMap, GateCountReport, Layout, count_report, route_linear};

pub type StateVector = state::StateVector<f64>;
pub type DensityMatrix = state::DensityMatrix<f64>;
pub type KrausChannel = state::KrausChannel<f64>;
pub type CMatrix = linalg::CMatrix<f64>;

pub type StateVector32 = state::StateVector<f32>;
pub type DensityMatrix32 = state::DensityMatrix<f32>;
pub type KrausChannel32 = state::KrausChannel<f32>;
pub type CMatrix32 = linalg::CMatrix<f32>;
