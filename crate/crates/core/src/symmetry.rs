//! Objective-function symmetries and their verification.
//!
//! Two families are supported: bit flips `x → x ⊕ l` (a product of Pauli X on
//! the flipped set) and node relabelings that preserve the edge set. Either is
//! verified by projecting onto the +1 eigenspace of its qubit operator `S`
//! with `M = (I + S)/2`, either directly on the density matrix or through a
//! Hadamard-test style ancilla circuit.

use itertools::Itertools;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::linalg::CMatrix;
use crate::maxcut::{Graph, ObjectiveDiagonal};
use crate::scalar::Real;
use crate::state::{DensityMatrix, MAX_QUBITS};

/// Largest graph handed to the brute-force automorphism search.
pub const MAX_AUTOMORPHISM_NODES: usize = 8;

/// Flip of the bits in `mask`; an objective symmetry by construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitFlipSymmetry {
    n_qubits: usize,
    mask: usize,
}

impl BitFlipSymmetry {
    /// Checks `f(x ⊕ mask) = f(x)` for every `x`.
    pub fn new(diag: &ObjectiveDiagonal, mask: usize) -> Result<Self> {
        let n = diag.n_qubits();
        if mask == 0 || mask >> n != 0 {
            return Err(Error::usage(format!("bit-flip mask {mask:#b} is empty or exceeds {n} qubits")));
        }
        let sym = Self { n_qubits: n, mask };
        if !check_commutes_with_objective(&SymmetryDescriptor::BitFlip(sym.clone()), diag)? {
            return Err(Error::config(format!("mask {mask:#b} does not preserve the objective")));
        }
        Ok(sym)
    }

    /// The flip of every bit; a symmetry of every MaxCut objective.
    pub fn global(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            mask: (1usize << n_qubits) - 1,
        }
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    /// Flipped qubits, ascending.
    pub fn flipped(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|q| (self.mask >> q) & 1 == 1).collect()
    }
}

/// Node relabeling `j → perm[j]` that maps the edge set onto itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSymmetry {
    perm: Vec<usize>,
    /// Disjoint swaps composing to `perm`; populated only for involutions.
    transpositions: Option<Vec<(usize, usize)>>,
}

impl PermutationSymmetry {
    /// Checks that `perm` is a permutation and an automorphism of `g`.
    pub fn new(g: &Graph, perm: Vec<usize>) -> Result<Self> {
        let n = g.n_nodes();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
            return Err(Error::usage(format!("{perm:?} is not a permutation of {n} nodes")));
        }
        if !preserves_edges(g, &perm) {
            return Err(Error::config(format!("{perm:?} does not preserve the edge set")));
        }
        Ok(Self {
            perm,
            transpositions: None,
        })
    }

    /// Builds the symmetry from disjoint swaps, populating `transpositions`.
    pub fn from_transpositions(g: &Graph, swaps: &[(usize, usize)]) -> Result<Self> {
        let mut perm: Vec<usize> = (0..g.n_nodes()).collect();
        for &(a, b) in swaps {
            if a >= perm.len() || b >= perm.len() || a == b || perm[a] != a || perm[b] != b {
                return Err(Error::usage(format!("swaps {swaps:?} are not disjoint transpositions")));
            }
            perm.swap(a, b);
        }
        let mut sym = Self::new(g, perm)?;
        sym.populate_transpositions();
        Ok(sym)
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn transpositions(&self) -> Option<&[(usize, usize)]> {
        self.transpositions.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_involution(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &v)| self.perm[v] == i)
    }

    fn populate_transpositions(&mut self) {
        if self.is_involution() {
            self.transpositions = Some(
                self.perm
                    .iter()
                    .enumerate()
                    .filter(|&(i, &v)| i < v)
                    .map(|(i, &v)| (i, v))
                    .collect(),
            );
        }
    }
}

fn preserves_edges(g: &Graph, perm: &[usize]) -> bool {
    g.edges().iter().all(|&(j, k)| g.has_edge(perm[j], perm[k]))
}

/// A symmetry whose qubit operator is applied during verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymmetryDescriptor {
    BitFlip(BitFlipSymmetry),
    Permutation(PermutationSymmetry),
}

impl SymmetryDescriptor {
    pub fn n_qubits(&self) -> usize {
        match self {
            SymmetryDescriptor::BitFlip(b) => b.n_qubits,
            SymmetryDescriptor::Permutation(p) => p.perm.len(),
        }
    }

    /// Image `a(x)` of a basis index: bit `perm[j]` of `a(x)` is bit `j` of `x`.
    pub fn apply_to_index(&self, x: usize) -> usize {
        match self {
            SymmetryDescriptor::BitFlip(b) => x ^ b.mask,
            SymmetryDescriptor::Permutation(p) => p
                .perm
                .iter()
                .enumerate()
                .filter(|&(j, _)| (x >> j) & 1 == 1)
                .fold(0, |acc, (_, &t)| acc | (1 << t)),
        }
    }

    /// Whether `S² = I`, i.e. the spectrum is ±1.
    pub fn is_involution(&self) -> bool {
        match self {
            SymmetryDescriptor::BitFlip(_) => true,
            SymmetryDescriptor::Permutation(p) => p.is_involution(),
        }
    }

    /// Short human-readable label, e.g. `bitflip{0,1,2}` or `perm(0 1)`.
    pub fn label(&self) -> String {
        match self {
            SymmetryDescriptor::BitFlip(b) => format!("bitflip{{{}}}", b.flipped().iter().join(",")),
            SymmetryDescriptor::Permutation(p) => match &p.transpositions {
                Some(t) => t.iter().map(|(a, b)| format!("({a} {b})")).join(""),
                None => format!("perm{:?}", p.perm),
            },
        }
    }
}

/// Every mask `L` with no edge leaving `L`, i.e. every nonempty union of
/// connected components, ascending by mask value.
pub fn find_bitflip_symmetries(g: &Graph) -> Result<Vec<BitFlipSymmetry>> {
    let n = g.n_nodes();
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::config(format!("bit-flip search needs 1..={MAX_QUBITS} nodes, got {n}")));
    }
    let diag = g.objective_diagonal()?;
    (1..1usize << n)
        .filter(|&mask| g.edges().iter().all(|&(j, k)| (mask >> j) & 1 == (mask >> k) & 1))
        .map(|mask| BitFlipSymmetry::new(&diag, mask))
        .collect()
}

/// All automorphisms (identity included) in lexicographic order of `perm`.
pub fn find_automorphisms(g: &Graph) -> Result<Vec<PermutationSymmetry>> {
    let n = g.n_nodes();
    if n > MAX_AUTOMORPHISM_NODES {
        return Err(Error::config(format!(
            "brute-force automorphism search limited to {MAX_AUTOMORPHISM_NODES} nodes, got {n}"
        )));
    }
    Ok((0..n)
        .permutations(n)
        .filter(|perm| preserves_edges(g, perm))
        .map(|perm| PermutationSymmetry {
            perm,
            transpositions: None,
        })
        .collect())
}

/// Keeps non-identity involutions (order preserved) and fills in their swaps.
pub fn filter_swap_representable(perms: &[PermutationSymmetry]) -> Vec<PermutationSymmetry> {
    perms
        .iter()
        .filter(|p| !p.is_identity() && p.is_involution())
        .map(|p| {
            let mut p = p.clone();
            p.populate_transpositions();
            p
        })
        .collect()
}

/// The lexicographically smallest non-identity involutive automorphism, if any.
pub fn default_permutation_symmetry(g: &Graph) -> Result<Option<PermutationSymmetry>> {
    Ok(filter_swap_representable(&find_automorphisms(g)?).into_iter().next())
}

/// `A = Σ_x |a(x)⟩⟨x|` on `n` qubits.
pub fn symmetry_matrix<T: Real>(sym: &SymmetryDescriptor, n: usize) -> Result<CMatrix<T>> {
    if sym.n_qubits() != n {
        return Err(Error::usage(format!(
            "symmetry on {} qubits requested on {n}",
            sym.n_qubits()
        )));
    }
    Ok(CMatrix::permutation(1 << n, |x| sym.apply_to_index(x)))
}

/// For a diagonal `C` and permutation `A`, `[A, C] = 0` iff `f(a(x)) = f(x)` for all `x`.
pub fn check_commutes_with_objective(sym: &SymmetryDescriptor, diag: &ObjectiveDiagonal) -> Result<bool> {
    if sym.n_qubits() != diag.n_qubits() {
        return Err(Error::usage("symmetry and objective disagree on qubit count"));
    }
    let f = diag.values();
    Ok((0..f.len()).all(|x| f[sym.apply_to_index(x)] == f[x]))
}

/// Verification fragment on `n + 1` qubits, ancilla at index `n`:
/// `H`, controlled-`S`, `H`. Bit flips use one CX per flipped qubit, permutations
/// one controlled SWAP per transposition.
pub fn build_verification_circuit(sym: &SymmetryDescriptor, n: usize) -> Result<Circuit> {
    if sym.n_qubits() != n {
        return Err(Error::usage(format!("symmetry on {} qubits, circuit on {n}", sym.n_qubits())));
    }
    let anc = n;
    let mut circ = Circuit::with_ancilla(n + 1, anc)?;
    circ.push(GateOp::h(anc))?;
    match sym {
        SymmetryDescriptor::BitFlip(b) => circ.extend(b.flipped().into_iter().map(|q| GateOp::cx(anc, q)))?,
        SymmetryDescriptor::Permutation(p) => {
            let swaps = p.transpositions().ok_or_else(|| {
                Error::usage(format!("permutation {:?} has no transposition form", p.perm()))
            })?;
            circ.extend(swaps.iter().map(|&(a, b)| GateOp::cswap(anc, a, b)))?;
        }
    }
    circ.push(GateOp::h(anc))?;
    Ok(circ)
}

/// `M = (I + S)/2`; fails for symmetries that are not involutions.
pub fn plus_projector<T: Real>(sym: &SymmetryDescriptor, n: usize) -> Result<CMatrix<T>> {
    if !sym.is_involution() {
        return Err(Error::config(format!("{} is not an involution; no ±1 projector", sym.label())));
    }
    let s = symmetry_matrix::<T>(sym, n)?;
    let half = Complex::new(T::lit(0.5), T::zero());
    Ok(CMatrix::identity(1 << n).add(&s).scale(half))
}

/// Exact projection onto the +1 eigenspace of `sym`.
pub fn ideal_project<T: Real>(dm: &DensityMatrix<T>, sym: &SymmetryDescriptor) -> Result<(DensityMatrix<T>, T)> {
    let n = crate::state::QuantumState::n_qubits(dm);
    dm.project_and_renormalize(&plus_projector(sym, n)?)
}

/// Keeps the ancilla-0 branch of a state whose last qubit is the verification ancilla.
pub fn circuit_postselect<T: Real>(dm_with_ancilla: &DensityMatrix<T>) -> Result<(DensityMatrix<T>, T)> {
    dm_with_ancilla.postselect_last_qubit_zero()
}

/// Projects onto each symmetry's +1 eigenspace in list order.
/// Returns the final state and the product of the stage retentions.
pub fn sequential_verify<T: Real>(
    dm: &DensityMatrix<T>,
    syms: &[SymmetryDescriptor],
) -> Result<(DensityMatrix<T>, T)> {
    let n = crate::state::QuantumState::n_qubits(dm);
    let mats = syms
        .iter()
        .map(|s| symmetry_matrix::<T>(s, n))
        .collect::<Result<Vec<_>>>()?;
    for (i, j) in (0..mats.len()).tuple_combinations() {
        if !mats[i].commutes_with(&mats[j], T::empty_threshold()) {
            return Err(Error::config(format!(
                "symmetries {} and {} do not commute",
                syms[i].label(),
                syms[j].label()
            )));
        }
    }
    syms.iter().try_fold((dm.clone(), T::one()), |(state, kept), sym| {
        let (next, r) = ideal_project(&state, sym)?;
        Ok((next, kept * r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::GateKind;
    use crate::maxcut::BenchmarkGraph;
    use crate::qaoa::{QaoaParams, build_qaoa_circuit};
    use crate::state::{QuantumState, StateVector, init_plus_state};

    // Independent oracle: a mask is a symmetry iff the cut is unchanged on every assignment.
    fn brute_force_masks(g: &Graph) -> Vec<usize> {
        let n = g.n_nodes();
        (1..1usize << n)
            .filter(|&m| (0..1usize << n).all(|x| g.cut_of_index(x) == g.cut_of_index(x ^ m)))
            .collect()
    }

    #[test]
    fn bitflip_examples() {
        for b in BenchmarkGraph::ALL {
            let g = b.graph();
            let masks: Vec<usize> = find_bitflip_symmetries(&g).unwrap().iter().map(|s| s.mask()).collect();
            assert_eq!(masks, vec![(1 << g.n_nodes()) - 1], "{b}");
            assert_eq!(masks, brute_force_masks(&g));
        }
        let two_edges = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let masks: Vec<usize> = find_bitflip_symmetries(&two_edges).unwrap().iter().map(|s| s.mask()).collect();
        assert_eq!(masks, vec![0b0011, 0b1100, 0b1111]);
        assert_eq!(masks, brute_force_masks(&two_edges));

        let diag = BenchmarkGraph::Path3.graph().objective_diagonal().unwrap();
        assert!(matches!(BitFlipSymmetry::new(&diag, 0b001), Err(Error::Config(_))));
    }

    #[test]
    fn automorphism_examples() {
        let count = |b: BenchmarkGraph| find_automorphisms(&b.graph()).unwrap().len();
        assert_eq!(count(BenchmarkGraph::Complete3), 6);
        assert_eq!(count(BenchmarkGraph::Star4), 6);
        assert_eq!(count(BenchmarkGraph::Kite4), 2);
        assert_eq!(count(BenchmarkGraph::Path3), 2);
        let kite = find_automorphisms(&BenchmarkGraph::Kite4.graph()).unwrap();
        assert!(kite[0].is_identity());
        assert_eq!(kite[1].perm(), &[1, 0, 2, 3]);
    }

    #[test]
    fn swap_filter() {
        let k3 = find_automorphisms(&BenchmarkGraph::Complete3.graph()).unwrap();
        let kept = filter_swap_representable(&k3);
        // three transpositions survive; identity and both 3-cycles are dropped
        assert_eq!(kept.len(), 3);
        assert!(kept.iter().all(|p| p.transpositions().unwrap().len() == 1));
        assert!(!kept.iter().any(|p| p.perm() == [1, 2, 0]));

        let star = filter_swap_representable(&find_automorphisms(&BenchmarkGraph::Star4.graph()).unwrap());
        assert!(star.iter().any(|p| p.transpositions() == Some(&[(1, 2)][..])));
    }

    #[test]
    fn matrices() {
        let x = symmetry_matrix::<f64>(&SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(1)), 1).unwrap();
        assert_eq!(x, GateKind::X.matrix());
        let path2 = Graph::new(2, [(0, 1)]).unwrap();
        let swap = PermutationSymmetry::from_transpositions(&path2, &[(0, 1)]).unwrap();
        let s = symmetry_matrix::<f64>(&SymmetryDescriptor::Permutation(swap), 2).unwrap();
        assert_eq!(s, GateKind::Swap.matrix());
        let xx = symmetry_matrix::<f64>(&SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(2)), 2).unwrap();
        assert_eq!(xx, CMatrix::permutation(4, |i| 3 - i));
    }

    #[test]
    fn commutation_examples() {
        let star = BenchmarkGraph::Star4.graph();
        let diag = star.objective_diagonal().unwrap();
        let global = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(4));
        assert!(check_commutes_with_objective(&global, &diag).unwrap());
        let leaf = SymmetryDescriptor::Permutation(PermutationSymmetry::from_transpositions(&star, &[(1, 2)]).unwrap());
        assert!(check_commutes_with_objective(&leaf, &diag).unwrap());

        let path = BenchmarkGraph::Path3.graph();
        assert!(PermutationSymmetry::from_transpositions(&path, &[(0, 1)]).is_err());
        let bogus = SymmetryDescriptor::Permutation(PermutationSymmetry {
            perm: vec![1, 0, 2],
            transpositions: Some(vec![(0, 1)]),
        });
        assert!(!check_commutes_with_objective(&bogus, &path.objective_diagonal().unwrap()).unwrap());
    }

    #[test]
    fn verification_circuit_shapes() {
        let global = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(4));
        let c = build_verification_circuit(&global, 4).unwrap();
        assert_eq!(c.len(), 6);
        assert_eq!(c.n_qubits(), 5);
        assert!(c.ops()[1..5].iter().all(|op| op.kind == GateKind::Cx && op.targets[0] == 4));

        let four = Graph::new(4, [(0, 2), (1, 3)]).unwrap();
        let two_swaps = PermutationSymmetry::from_transpositions(&four, &[(0, 1), (2, 3)]).unwrap();
        let c = build_verification_circuit(&SymmetryDescriptor::Permutation(two_swaps), 4).unwrap();
        let kinds: Vec<_> = c.ops().iter().map(|op| op.kind).collect();
        assert_eq!(kinds, vec![GateKind::H, GateKind::Cswap, GateKind::Cswap, GateKind::H]);

        let star = BenchmarkGraph::Star4.graph();
        let cycle = PermutationSymmetry::new(&star, vec![0, 2, 3, 1]).unwrap();
        assert!(matches!(
            build_verification_circuit(&SymmetryDescriptor::Permutation(cycle), 4),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn bitflip_fragment_keeps_plus_state() {
        let mut s = init_plus_state::<f64>(3).unwrap().to_density().with_ancilla().unwrap();
        let frag = build_verification_circuit(&SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(3)), 3).unwrap();
        s.apply_circuit(&frag).unwrap();
        let (_, r) = circuit_postselect(&s).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ideal_projection_examples() {
        let g = BenchmarkGraph::Kite4.graph();
        let params = QaoaParams::new(vec![0.3, 0.9], vec![1.1, 0.4]).unwrap();
        let rho = build_qaoa_circuit(&g, &params).unwrap().simulate::<f64>().unwrap().to_density();
        let global = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(4));
        let (out, r) = ideal_project(&rho, &global).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!(out.elements().approx_eq(rho.elements(), 1e-9));

        let rho01 = StateVector::<f64>::basis(2, 0b10).unwrap().to_density();
        let (out, r) = ideal_project(&rho01, &SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(2))).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let target = StateVector::from_amplitudes(vec![
            Complex::new(0.0, 0.0),
            Complex::new(h, 0.0),
            Complex::new(h, 0.0),
            Complex::new(0.0, 0.0),
        ])
        .unwrap();
        assert!(out.elements().approx_eq(target.to_density().elements(), 1e-12));
    }

    #[test]
    fn maximally_mixed_retention_is_eigenspace_fraction() {
        // Oracle: d₊ counted by orbit structure; each fixed point contributes 1,
        // each 2-cycle contributes one +1 and one -1 eigenvector.
        let star = BenchmarkGraph::Star4.graph();
        let syms = [
            SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(4)),
            SymmetryDescriptor::Permutation(PermutationSymmetry::from_transpositions(&star, &[(1, 2)]).unwrap()),
        ];
        let mixed = DensityMatrix::<f64>::maximally_mixed(4).unwrap();
        for sym in &syms {
            let fixed = (0..16).filter(|&x| sym.apply_to_index(x) == x).count();
            let d_plus = fixed + (16 - fixed) / 2;
            let (_, r) = ideal_project(&mixed, sym).unwrap();
            assert!((r - d_plus as f64 / 16.0).abs() < 1e-12, "{}", sym.label());
        }
    }

    #[test]
    fn sequential_examples() {
        let star = BenchmarkGraph::Star4.graph();
        let params = QaoaParams::new(vec![0.4], vec![0.8]).unwrap();
        let rho = build_qaoa_circuit(&star, &params).unwrap().simulate::<f64>().unwrap().to_density();
        let global = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(4));
        let leaf = SymmetryDescriptor::Permutation(PermutationSymmetry::from_transpositions(&star, &[(1, 2)]).unwrap());
        let (out, r) = sequential_verify(&rho, &[global.clone(), leaf.clone()]).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!(out.elements().approx_eq(rho.elements(), 1e-9));

        let mut noisy = rho.clone();
        noisy.apply_gate(&GateOp::rx(1, 0.3)).unwrap();
        let (a, ra) = sequential_verify(&noisy, &[global.clone(), leaf.clone()]).unwrap();
        let (b, rb) = sequential_verify(&noisy, &[leaf.clone(), global.clone()]).unwrap();
        assert!(a.elements().approx_eq(b.elements(), 1e-10) && (ra - rb).abs() < 1e-10);

        let (single, rs) = sequential_verify(&noisy, std::slice::from_ref(&leaf)).unwrap();
        let (ideal, ri) = ideal_project(&noisy, &leaf).unwrap();
        assert!(single.elements().approx_eq(ideal.elements(), 1e-15) && rs == ri);

        // X on qubit 0 and the swap (0 1) do not commute
        let path2 = Graph::new(2, []).unwrap();
        let diag = path2.objective_diagonal().unwrap();
        let x0 = SymmetryDescriptor::BitFlip(BitFlipSymmetry::new(&diag, 0b01).unwrap());
        let sw = SymmetryDescriptor::Permutation(PermutationSymmetry::from_transpositions(&path2, &[(0, 1)]).unwrap());
        let rho2 = DensityMatrix::<f64>::maximally_mixed(2).unwrap();
        assert!(matches!(sequential_verify(&rho2, &[x0, sw]), Err(Error::Config(_))));
    }

    #[test]
    fn postselect_examples() {
        let mut psi = StateVector::<f64>::zero(2).unwrap();
        psi.apply_gate(&GateOp::rx(0, 0.7)).unwrap();
        psi.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let rho = psi.to_density();
        let (out, r) = circuit_postselect(&rho.with_ancilla().unwrap()).unwrap();
        assert_eq!(r, 1.0);
        assert!(out.elements().approx_eq(rho.elements(), 1e-15));

        let mut flipped = rho.with_ancilla().unwrap();
        flipped.apply_gate(&GateOp::x(2)).unwrap();
        assert!(matches!(circuit_postselect(&flipped), Err(Error::EmptyPostselection(_))));
    }
}
