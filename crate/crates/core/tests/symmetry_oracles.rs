mod common;

use std::collections::BTreeSet;

use itertools::Itertools;
use symqaoa::symmetry::{
    build_verification_circuit, circuit_postselect, filter_swap_representable, find_automorphisms,
    find_bitflip_symmetries, ideal_project,
};
use symqaoa::{BenchmarkGraph, BitFlipSymmetry, Graph, QuantumState, SymmetryDescriptor};

use common::random_noisy_state;

fn benchmark_symmetries(g: &Graph) -> Vec<SymmetryDescriptor> {
    let mut syms = vec![SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(g.n_nodes()))];
    let autos = find_automorphisms(g).unwrap();
    syms.extend(filter_swap_representable(&autos).into_iter().map(SymmetryDescriptor::Permutation));
    syms
}

#[test]
fn ancilla_circuit_matches_projector() {
    for b in BenchmarkGraph::ALL {
        let g = b.graph();
        let n = g.n_nodes();
        for sym in benchmark_symmetries(&g) {
            let fragment = build_verification_circuit(&sym, n).unwrap();
            for seed in 0..20 {
                let rho = random_noisy_state(n, 1000 * b as u64 + seed);
                let (ideal, r_ideal) = ideal_project(&rho, &sym).unwrap();
                let mut with_anc = rho.with_ancilla().unwrap();
                with_anc.apply_circuit(&fragment).unwrap();
                let (circ, r_circ) = circuit_postselect(&with_anc).unwrap();
                assert!(
                    circ.elements().max_abs_diff(ideal.elements()) <= 1e-10,
                    "{} {} seed {seed}",
                    b.name(),
                    sym.label()
                );
                assert!((r_circ - r_ideal).abs() <= 1e-10);
            }
        }
    }
}

/// Number of distinct labeled graphs isomorphic to `edges`.
fn isomorphism_class_size(n: usize, edges: &[(usize, usize)]) -> usize {
    (0..n)
        .permutations(n)
        .map(|p| {
            edges
                .iter()
                .map(|&(j, k)| (p[j].min(p[k]), p[j].max(p[k])))
                .collect::<BTreeSet<_>>()
        })
        .collect::<BTreeSet<_>>()
        .len()
}

#[test]
fn automorphism_counts_match_orbit_stabilizer() {
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        let factorial: usize = (1..=n).product();
        for bits in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| (bits >> i) & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::new(n, edges.iter().copied()).unwrap();
            let expected = factorial / isomorphism_class_size(n, &edges);
            assert_eq!(find_automorphisms(&g).unwrap().len(), expected, "n={n} edges={edges:?}");
        }
    }
}

#[test]
fn benchmark_automorphism_and_bitflip_counts() {
    let count = |b: BenchmarkGraph| find_automorphisms(&b.graph()).unwrap().len();
    assert_eq!(count(BenchmarkGraph::Complete3), 6);
    assert_eq!(count(BenchmarkGraph::Star4), 6);
    assert_eq!(count(BenchmarkGraph::Kite4), 2);
    assert_eq!(count(BenchmarkGraph::Path3), 2);
    for b in BenchmarkGraph::ALL {
        let g = b.graph();
        let masks: Vec<usize> = find_bitflip_symmetries(&g).unwrap().iter().map(|s| s.mask()).collect();
        assert_eq!(masks, vec![(1 << g.n_nodes()) - 1], "{}", b.name());
    }
}

#[test]
fn disconnected_graph_has_component_masks() {
    let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
    let masks: Vec<usize> = find_bitflip_symmetries(&g).unwrap().iter().map(|s| s.mask()).collect();
    assert_eq!(masks, vec![0b0011, 0b1100, 0b1111]);
}
