#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symqaoa::noise::{depolarizing_channel, thermal_relaxation_channel};
use symqaoa::{Circuit, DensityMatrix, GateOp, QuantumState};

/// Random circuit of `len` gates from {H, X, RX, RZ, RZZ, CX} on `n` qubits.
pub fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n.max(2))) % n;
        let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let op = match rng.random_range(0..6) {
            0 => GateOp::h(a),
            1 => GateOp::x(a),
            2 => GateOp::rx(a, theta),
            3 => GateOp::rz(a, theta),
            4 if n > 1 => GateOp::rzz(a, b, theta),
            5 if n > 1 => GateOp::cx(a, b),
            _ => GateOp::h(a),
        };
        c.push(op).unwrap();
    }
    c
}

/// Mixed state from a random circuit interleaved with random-strength
/// depolarizing and thermal-relaxation channels.
pub fn random_noisy_state(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rho = DensityMatrix::zero(n).unwrap();
    for _ in 0..6 {
        rho.apply_circuit(&random_circuit(n, 3 * n, &mut rng)).unwrap();
        let q = rng.random_range(0..n);
        let p: f64 = rng.random_range(0.0..0.3);
        rho.apply_channel(&depolarizing_channel(p, 1).unwrap(), &[q]).unwrap();
        if n > 1 {
            let r = (q + 1) % n;
            let p2: f64 = rng.random_range(0.0..0.2);
            rho.apply_channel(&depolarizing_channel(p2, 2).unwrap(), &[q, r]).unwrap();
        }
        let t1: f64 = rng.random_range(1.0..10.0);
        let t2 = rng.random_range(0.1..2.0 * t1);
        let d = rng.random_range(0.0..2.0);
        rho.apply_channel(&thermal_relaxation_channel(t1, t2, d).unwrap(), &[q]).unwrap();
    }
    rho
}

/// Smallest eigenvalue of a Hermitian matrix, via nalgebra.
pub fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    let dim = rho.dim();
    let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| rho.elements()[(r, c)]);
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
