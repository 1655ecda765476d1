mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symqaoa::noise::{NoiseModel, depolarizing_channel, thermal_relaxation_channel};
use symqaoa::symmetry::{ideal_project, plus_projector, sequential_verify, symmetry_matrix};
use symqaoa::transpile::decompose_to_cx_basis;
use symqaoa::{
    BenchmarkGraph, BitFlipSymmetry, DensityMatrix, Graph, PermutationSymmetry, QaoaParams, QuantumState, StateVector,
    SymmetryDescriptor, apply_noisy_circuit, build_qaoa_circuit, exact_expectation,
};

use common::{min_eigenvalue, random_circuit, random_noisy_state};

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=5).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()).prop_map(move |e| Graph::new(n, e).unwrap())
    })
}

fn angles(p: usize) -> impl Strategy<Value = QaoaParams> {
    (
        prop::collection::vec(-7.0f64..7.0, p),
        prop::collection::vec(-4.0f64..4.0, p),
    )
        .prop_map(|(b, g)| QaoaParams::new(b, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn statevector_norm_preserved(n in 1usize..=5, len in 1usize..60, seed in any::<u64>()) {
        let circ = random_circuit(n, len, &mut ChaCha8Rng::seed_from_u64(seed));
        let psi = circ.simulate::<f64>().unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-9 * len as f64);
    }

    #[test]
    fn channels_preserve_trace_and_positivity(n in 1usize..=4, seed in any::<u64>()) {
        let rho = random_noisy_state(n, seed);
        // 6 rounds of up to 3 channels each
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-9 * 18.0);
        prop_assert!(min_eigenvalue(&rho) > -1e-10);
        prop_assert!(rho.elements().is_hermitian(1e-12));
    }

    #[test]
    fn statevector_and_density_matrix_agree(n in 1usize..=4, len in 1usize..40, seed in any::<u64>()) {
        let circ = random_circuit(n, len, &mut ChaCha8Rng::seed_from_u64(seed));
        let psi = circ.simulate::<f64>().unwrap();
        let mut rho = DensityMatrix::zero(n).unwrap();
        rho.apply_circuit(&circ).unwrap();
        prop_assert!((rho.fidelity_pure(&psi).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_noise_reproduces_ideal_evolution(n in 1usize..=4, len in 1usize..30, seed in any::<u64>()) {
        let circ = random_circuit(n, len, &mut ChaCha8Rng::seed_from_u64(seed));
        let psi = circ.simulate::<f64>().unwrap();
        let rho = apply_noisy_circuit(&circ, &NoiseModel::noiseless(), &DensityMatrix::zero(n).unwrap()).unwrap();
        prop_assert!((rho.fidelity_pure(&psi).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent(n in 2usize..=4, seed in any::<u64>(), mask in 1usize..16) {
        let mask = mask & ((1 << n) - 1);
        prop_assume!(mask != 0);
        let rho = random_noisy_state(n, seed);
        let m = plus_projector::<f64>(&SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(n)), n).unwrap();
        let flip = symqaoa::CMatrix::permutation(1 << n, |x| x ^ mask);
        let m2 = symqaoa::CMatrix::identity(1 << n).add(&flip).scale(num_complex::Complex::new(0.5, 0.0));
        for proj in [m, m2] {
            if let Ok((once, _)) = rho.project_and_renormalize(&proj) {
                let (twice, r) = once.project_and_renormalize(&proj).unwrap();
                prop_assert!(twice.elements().approx_eq(once.elements(), 1e-10));
                prop_assert!((r - 1.0).abs() < 1e-10);
            }
        }
    }

    /// For any ρ and any |ψ⟩ in the +1 eigenspace, projecting never lowers the overlap.
    #[test]
    fn projection_never_lowers_fidelity(g in graph_strategy(), params in angles(2), seed in any::<u64>()) {
        let n = g.n_nodes();
        let psi: StateVector = build_qaoa_circuit(&g, &params).unwrap().simulate().unwrap();
        let rho = random_noisy_state(n, seed);
        let before = rho.fidelity_pure(&psi).unwrap();
        let sym = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(n));
        let (after, _) = ideal_project(&rho, &sym).unwrap();
        prop_assert!(after.fidelity_pure(&psi).unwrap() >= before - 1e-10);
    }

    #[test]
    fn sequential_verification_monotone_per_stage(params in angles(2), seed in any::<u64>()) {
        for b in BenchmarkGraph::ALL {
            let g = b.graph();
            let n = g.n_nodes();
            let psi: StateVector = build_qaoa_circuit(&g, &params).unwrap().simulate().unwrap();
            let perm = symqaoa::symmetry::default_permutation_symmetry(&g).unwrap().unwrap();
            let syms = [
                SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(n)),
                SymmetryDescriptor::Permutation(perm),
            ];
            let mut rho = random_noisy_state(n, seed);
            let mut f = rho.fidelity_pure(&psi).unwrap();
            for stage in 1..=syms.len() {
                let (next, _) = sequential_verify(&random_noisy_state(n, seed), &syms[..stage]).unwrap();
                let f_next = next.fidelity_pure(&psi).unwrap();
                prop_assert!(f_next >= f - 1e-10);
                rho = next;
                f = f_next;
            }
            prop_assert!(rho.trace() > 0.0);
        }
    }

    #[test]
    fn cut_invariants(g in graph_strategy(), x in any::<u32>()) {
        let n = g.n_nodes();
        let x = x as usize & ((1 << n) - 1);
        let bits: Vec<bool> = (0..n).map(|q| (x >> q) & 1 == 1).collect();
        let complement: Vec<bool> = bits.iter().map(|b| !b).collect();
        let cut = g.cut_value(&bits).unwrap();
        prop_assert_eq!(cut, g.cut_value(&complement).unwrap());
        prop_assert!(cut <= g.edges().len());
        prop_assert_eq!(g.objective_diagonal().unwrap().values()[x], cut as f64);
    }

    #[test]
    fn expectation_within_objective_range(g in graph_strategy(), params in angles(3)) {
        let e = exact_expectation(&g, &params).unwrap();
        let max = g.objective_diagonal().unwrap().max_value();
        prop_assert!(e >= -1e-12 && e <= max + 1e-12);
    }

    #[test]
    fn discovered_symmetries_commute_and_square_to_identity(g in graph_strategy()) {
        let n = g.n_nodes();
        let diag = g.objective_diagonal().unwrap();
        let mut syms: Vec<SymmetryDescriptor> = symqaoa::symmetry::find_bitflip_symmetries(&g)
            .unwrap()
            .into_iter()
            .map(SymmetryDescriptor::BitFlip)
            .collect();
        let autos = symqaoa::symmetry::find_automorphisms(&g).unwrap();
        syms.extend(symqaoa::symmetry::filter_swap_representable(&autos).into_iter().map(SymmetryDescriptor::Permutation));
        for a in &autos {
            prop_assert!(symqaoa::symmetry::check_commutes_with_objective(&SymmetryDescriptor::Permutation(a.clone()), &diag).unwrap());
        }
        for s in &syms {
            prop_assert!(symqaoa::symmetry::check_commutes_with_objective(s, &diag).unwrap());
            let m = symmetry_matrix::<f64>(s, n).unwrap();
            prop_assert_eq!(&(&m * &m), &symqaoa::CMatrix::identity(1 << n));
        }
    }

    #[test]
    fn thermal_relaxation_keeps_states_physical(
        t1 in 1e-6f64..1e-3, ratio in 0.01f64..2.0, d in 0.0f64..1e-4, seed in any::<u64>()
    ) {
        let ch = thermal_relaxation_channel(t1, ratio * t1, d).unwrap();
        let mut rho = random_noisy_state(1, seed);
        rho.apply_channel(&ch, &[0]).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        prop_assert!(min_eigenvalue(&rho) > -1e-12);
    }

    #[test]
    fn depolarizing_is_cptp(p in 0.0f64..=1.0, k in 1usize..=2) {
        let ch = depolarizing_channel(p, k).unwrap();
        let dim = 1 << k;
        let sum = ch
            .operators()
            .iter()
            .fold(symqaoa::CMatrix::zeros(dim), |acc, op| acc.add(&(&op.adjoint() * op)));
        prop_assert!(sum.approx_eq(&symqaoa::CMatrix::identity(dim), 1e-9));
    }

    #[test]
    fn decomposition_preserves_unitary(g_idx in 0usize..4, params in angles(2), prep_seed in any::<u64>()) {
        let g = BenchmarkGraph::ALL[g_idx].graph();
        let n = g.n_nodes();
        let mut circ = random_circuit(n, 2 * n, &mut ChaCha8Rng::seed_from_u64(prep_seed));
        circ.append(&build_qaoa_circuit(&g, &params).unwrap()).unwrap();
        let a: StateVector = circ.simulate().unwrap();
        let b: StateVector = decompose_to_cx_basis(&circ).unwrap().simulate().unwrap();
        prop_assert!((a.inner(&b).norm_sqr() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn thousand_random_single_qubit_states_stay_physical() {
    let ch = thermal_relaxation_channel(120e-6, 80e-6, 35e-9).unwrap();
    let strong = thermal_relaxation_channel(10e-6, 15e-6, 20e-6).unwrap();
    for seed in 0..1000 {
        for c in [&ch, &strong] {
            let mut rho = random_noisy_state(1, seed);
            rho.apply_channel(c, &[0]).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert!(min_eigenvalue(&rho) > -1e-12);
        }
    }
}

#[test]
fn noisy_fidelity_decreases_with_two_qubit_error() {
    let g = BenchmarkGraph::Star4.graph();
    let params = QaoaParams::new(vec![0.4], vec![0.7]).unwrap();
    let circ = build_qaoa_circuit(&g, &params).unwrap();
    let psi: StateVector = circ.simulate().unwrap();
    let mut last = 1.0 + 1e-12;
    for p2 in [0.0, 0.001, 0.005, 0.01, 0.05] {
        let nm = NoiseModel {
            p_depol_2q: p2,
            ..NoiseModel::noiseless()
        };
        let f = apply_noisy_circuit(&circ, &nm, &DensityMatrix::zero(4).unwrap())
            .unwrap()
            .fidelity_pure(&psi)
            .unwrap();
        assert!(f < last, "p2={p2}: {f} !< {last}");
        if p2 > 0.0 {
            assert!(f < 1.0);
        }
        last = f;
    }
}

#[test]
fn automorphisms_are_edge_preserving() {
    let kite = BenchmarkGraph::Kite4.graph();
    assert!(PermutationSymmetry::new(&kite, vec![1, 0, 2, 3]).is_ok());
    assert!(PermutationSymmetry::new(&kite, vec![0, 1, 3, 2]).is_err());
}
