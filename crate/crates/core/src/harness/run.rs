use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{CouplingKind, CouplingSpec, ExperimentConfig, SvMode, SvPlacement, SvRealization};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::maxcut::{Graph, ObjectiveDiagonal};
use crate::noise::{NoiseModel, apply_noisy_circuit};
use crate::qaoa::{QaoaParams, SampleStats, append_layer, build_qaoa_circuit, distribution_statistics, optimize_up_to, sample_statistics};
use crate::readout::{CalibrationMatrix, apply_readout_error, build_calibration_matrix, mitigate_counts};
use crate::state::{Counts, DensityMatrix, QuantumState, StateVector, sample_counts};
use crate::symmetry::{
    BitFlipSymmetry, SymmetryDescriptor, build_verification_circuit, circuit_postselect, default_permutation_symmetry,
    ideal_project,
};
use crate::transpile::{GateCountReport, Layout, count_report, decompose_to_cx_basis, relative_overhead, route_linear};

/// Figures of merit for one (graph, p, variant) cell. Optional fields are
/// `null` when they do not apply or when the variant failed (see `error`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub graph: String,
    pub p: usize,
    pub variant: String,
    pub noisy: bool,
    pub sv: SvMode,
    pub sv_realization: Option<SvRealization>,
    pub sv_placement: Option<SvPlacement>,
    pub meas_em: bool,
    /// `⟨ψ|ρ|ψ⟩` against the noiseless QAOA state.
    pub fidelity: Option<f64>,
    /// `Tr[ρC]` of the variant's final (postselected) state.
    #[serde(rename = "expected_C_exact")]
    pub expected_c_exact: Option<f64>,
    pub sample_mean: Option<f64>,
    pub sample_std: Option<f64>,
    pub pr_opt: Option<f64>,
    /// Exact postselection probability (product over verification rounds).
    pub retention: Option<f64>,
    /// Fraction of shots kept by shot-level postselection.
    pub shot_retention: Option<f64>,
    pub cx_count: usize,
    /// `cx_count` relative to the unverified circuit under the same coupling.
    pub overhead: f64,
    pub params_used: QaoaParams,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug)]
struct Variant {
    noisy: bool,
    sv: SvMode,
    meas_em: bool,
}

impl Variant {
    fn label(&self, cfg: &ExperimentConfig) -> String {
        let mut parts = vec![if self.noisy { "noisy" } else { "noiseless" }, self.sv.name()];
        if self.sv != SvMode::None {
            parts.push(cfg.sv_realization.name());
            parts.push(cfg.sv_placement.name());
        }
        if self.meas_em {
            parts.push("meas_em");
        }
        parts.join("/")
    }
}

fn variant_grid(cfg: &ExperimentConfig, noise: Option<&NoiseModel>) -> Vec<Variant> {
    let svs = cfg.sv_mode.variants();
    let mut out: Vec<Variant> = svs
        .iter()
        .map(|&sv| Variant {
            noisy: false,
            sv,
            meas_em: false,
        })
        .collect();
    if let Some(nm) = noise {
        let em_options: &[bool] = if cfg.meas_em && nm.has_readout_error() { &[false, true] } else { &[false] };
        for &sv in &svs {
            for &meas_em in em_options {
                out.push(Variant { noisy: true, sv, meas_em });
            }
        }
    }
    out
}

/// Everything shared by the variants of one depth.
struct DepthContext<'a> {
    graph: &'a Graph,
    diag: &'a ObjectiveDiagonal,
    params: QaoaParams,
    reference: StateVector<f64>,
    /// Verification points: the circuit is cut after each segment.
    segments: Vec<Circuit>,
    base_cx: usize,
}

/// Runs the whole variant grid. Graph paths resolve relative to the working directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentResult>> {
    run_experiment_on(cfg, None)
}

/// As [`run_experiment`], resolving relative graph paths against `base`.
pub fn run_experiment_on(cfg: &ExperimentConfig, base: Option<&Path>) -> Result<Vec<ExperimentResult>> {
    cfg.validate()?;
    let (label, graph) = cfg.graph.resolve(base)?;
    let noise = cfg.noise.resolve()?;
    let diag = graph.objective_diagonal()?;
    let n = graph.n_nodes();

    let calibration = match &noise {
        Some(nm) if nm.has_readout_error() => Some(build_calibration_matrix(&expand_readout(nm, n)?, n)?),
        _ => None,
    };

    let perm = if matches!(cfg.sv_mode, SvMode::Permutation | SvMode::Both) {
        default_permutation_symmetry(&graph)?
    } else {
        None
    };
    let bitflip = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(n));

    let p_max = *cfg.p_values.iter().max().expect("validated nonempty");
    let ladder = optimize_up_to(&graph, p_max, &cfg.optimizer)?;
    let variants = variant_grid(cfg, noise.as_ref());

    let mut results = Vec::new();
    let mut depths = cfg.p_values.clone();
    depths.sort_unstable();
    depths.dedup();
    for p in depths {
        let params = ladder[p - 1].params.clone();
        let full = build_qaoa_circuit(&graph, &params)?;
        let segments = match cfg.sv_placement {
            SvPlacement::End => vec![full.clone()],
            SvPlacement::AfterEachLayer => layer_segments(&graph, &params)?,
        };
        let ctx = DepthContext {
            graph: &graph,
            diag: &diag,
            reference: full.simulate::<f64>()?,
            base_cx: cx_count(&full, &cfg.coupling, &graph)?,
            params,
            segments,
        };
        let cell: Vec<ExperimentResult> = variants
            .par_iter()
            .map(|v| {
                let syms: Result<Vec<SymmetryDescriptor>> = match v.sv {
                    SvMode::None => Ok(vec![]),
                    SvMode::Bitflip => Ok(vec![bitflip.clone()]),
                    SvMode::Permutation | SvMode::Both => match &perm {
                        None => Err(Error::config(format!("{label} has no swap-representable automorphism"))),
                        Some(ps) => {
                            let ps = SymmetryDescriptor::Permutation(ps.clone());
                            Ok(if v.sv == SvMode::Both { vec![bitflip.clone(), ps] } else { vec![ps] })
                        }
                    },
                };
                run_variant(cfg, &ctx, &label, p, *v, syms, noise.as_ref(), calibration.as_ref())
            })
            .collect::<Result<_>>()?;
        results.extend(cell);
    }
    Ok(results)
}

fn expand_readout(nm: &NoiseModel, n: usize) -> Result<Vec<crate::readout::ReadoutError>> {
    match nm.readout.len() {
        1 => Ok(vec![nm.readout[0]; n]),
        len if len == n => Ok(nm.readout.clone()),
        len => Err(Error::config(format!("{len} readout entries for {n} qubits (give 1 or {n})"))),
    }
}

fn layer_segments(g: &Graph, params: &QaoaParams) -> Result<Vec<Circuit>> {
    let n = g.n_nodes();
    (0..params.p())
        .map(|k| {
            let mut seg = Circuit::new(n);
            if k == 0 {
                seg.extend((0..n).map(GateOp::h))?;
            }
            append_layer(&mut seg, g, params.gammas[k], params.betas[k])?;
            Ok(seg)
        })
        .collect()
}

fn cx_count(circ: &Circuit, coupling: &CouplingSpec, g: &Graph) -> Result<usize> {
    Ok(gate_report(circ, coupling, g)?.cx_count)
}

fn gate_report(circ: &Circuit, coupling: &CouplingSpec, g: &Graph) -> Result<GateCountReport> {
    let lowered = match coupling.kind {
        CouplingKind::All => decompose_to_cx_basis(circ)?,
        CouplingKind::Linear => {
            let mut positions = coupling.data_layout(g)?.positions().to_vec();
            positions.extend(g.n_nodes()..circ.n_qubits());
            let routed = route_linear(circ, circ.n_qubits(), &Layout::new(positions)?)?;
            decompose_to_cx_basis(&routed.circuit)?
        }
    };
    count_report(&lowered)
}

/// Gate counts of the depth-`p` QAOA circuit without and with verification.
/// Counts do not depend on the angles. Returns `(base, verified, overhead)`.
pub fn verification_gate_counts(
    g: &Graph,
    p: usize,
    sv: SvMode,
    placement: SvPlacement,
    coupling: &CouplingSpec,
) -> Result<(GateCountReport, GateCountReport, f64)> {
    if p == 0 {
        return Err(Error::config("QAOA depth must be at least 1"));
    }
    let params = QaoaParams::new(vec![0.5; p], vec![0.5; p])?;
    let full = build_qaoa_circuit(g, &params)?;
    let base = gate_report(&full, coupling, g)?;
    let n = g.n_nodes();
    let bitflip = SymmetryDescriptor::BitFlip(BitFlipSymmetry::global(n));
    let perm = || -> Result<SymmetryDescriptor> {
        default_permutation_symmetry(g)?
            .map(SymmetryDescriptor::Permutation)
            .ok_or_else(|| Error::config("graph has no swap-representable automorphism"))
    };
    let syms = match sv {
        SvMode::None => return Ok((base, base, 1.0)),
        SvMode::Bitflip => vec![bitflip],
        SvMode::Permutation => vec![perm()?],
        SvMode::Both => vec![bitflip, perm()?],
    };
    let segments = match placement {
        SvPlacement::End => vec![full],
        SvPlacement::AfterEachLayer => layer_segments(g, &params)?,
    };
    let mut circ = Circuit::with_ancilla(n + 1, n)?;
    for seg in &segments {
        circ.extend(seg.ops().iter().cloned())?;
        for sym in &syms {
            circ.extend(build_verification_circuit(sym, n)?.ops().iter().cloned())?;
        }
    }
    let with = gate_report(&circ, coupling, g)?;
    let overhead = relative_overhead(&with, &base)?;
    Ok((base, with, overhead))
}

/// Logical circuit with every verification fragment inlined on one reused ancilla.
fn verified_circuit(ctx: &DepthContext<'_>, syms: &[SymmetryDescriptor]) -> Result<Circuit> {
    let n = ctx.graph.n_nodes();
    let mut circ = Circuit::with_ancilla(n + 1, n)?;
    for seg in &ctx.segments {
        circ.extend(seg.ops().iter().cloned())?;
        for sym in syms {
            circ.extend(build_verification_circuit(sym, n)?.ops().iter().cloned())?;
        }
    }
    Ok(circ)
}

fn evolve(rho: &DensityMatrix<f64>, circ: &Circuit, noise: Option<&NoiseModel>) -> Result<DensityMatrix<f64>> {
    match noise {
        Some(nm) => apply_noisy_circuit(circ, nm, rho),
        None => {
            let mut out = rho.clone();
            out.apply_circuit(circ)?;
            Ok(out)
        }
    }
}

/// Final state and total retention of one variant.
fn simulate_variant(
    ctx: &DepthContext<'_>,
    syms: &[SymmetryDescriptor],
    realization: SvRealization,
    noise: Option<&NoiseModel>,
) -> Result<(DensityMatrix<f64>, f64)> {
    let n = ctx.graph.n_nodes();
    let mut rho = DensityMatrix::<f64>::zero(n)?;
    let mut kept = 1.0;
    for seg in &ctx.segments {
        rho = evolve(&rho, seg, noise)?;
        for sym in syms {
            let (next, r) = match realization {
                SvRealization::IdealProjection => ideal_project(&rho, sym)?,
                SvRealization::AncillaCircuit => {
                    let fragment = build_verification_circuit(sym, n)?;
                    circuit_postselect(&evolve(&rho.with_ancilla()?, &fragment, noise)?)?
                }
            };
            rho = next;
            kept *= r;
        }
    }
    Ok((rho, kept))
}

/// Clips round-off negatives and renormalizes.
fn clean_distribution(probs: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = probs.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    clipped.into_iter().map(|p| p / total).collect()
}

fn depth_seed(seed: u64, p: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(p as u64)
}

#[allow(clippy::too_many_arguments)]
fn run_variant(
    cfg: &ExperimentConfig,
    ctx: &DepthContext<'_>,
    label: &str,
    p: usize,
    v: Variant,
    syms: Result<Vec<SymmetryDescriptor>>,
    noise: Option<&NoiseModel>,
    calibration: Option<&CalibrationMatrix>,
) -> Result<ExperimentResult> {
    let has_sv = v.sv != SvMode::None;
    let mut res = ExperimentResult {
        graph: label.to_owned(),
        p,
        variant: v.label(cfg),
        noisy: v.noisy,
        sv: v.sv,
        sv_realization: has_sv.then_some(cfg.sv_realization),
        sv_placement: has_sv.then_some(cfg.sv_placement),
        meas_em: v.meas_em,
        fidelity: None,
        expected_c_exact: None,
        sample_mean: None,
        sample_std: None,
        pr_opt: None,
        retention: None,
        shot_retention: None,
        cx_count: ctx.base_cx,
        overhead: 1.0,
        params_used: ctx.params.clone(),
        error: None,
    };
    let syms = match syms {
        Ok(s) => s,
        Err(e) => {
            res.error = Some(e.to_string());
            return Ok(res);
        }
    };
    if has_sv {
        res.cx_count = cx_count(&verified_circuit(ctx, &syms)?, &cfg.coupling, ctx.graph)?;
        res.overhead = if ctx.base_cx == 0 { 1.0 } else { res.cx_count as f64 / ctx.base_cx as f64 };
    }

    let noise = if v.noisy { noise } else { None };
    let (rho, retention) = match simulate_variant(ctx, &syms, cfg.sv_realization, noise) {
        Ok(x) => x,
        Err(e @ Error::EmptyPostselection(_)) => {
            res.retention = has_sv.then_some(0.0);
            res.error = Some(e.to_string());
            return Ok(res);
        }
        Err(e) => return Err(e),
    };
    let probs = clean_distribution(&rho.probabilities());
    res.fidelity = Some(rho.fidelity_pure(&ctx.reference)?);
    res.expected_c_exact = Some(ctx.diag.expectation(&probs));
    if has_sv {
        res.retention = Some(retention.clamp(0.0, 1.0));
    }

    let seed = depth_seed(cfg.seed, p);
    let shots = if has_sv {
        let kept = Binomial::new(cfg.shots, retention.clamp(0.0, 1.0))
            .map_err(|e| Error::config(format!("binomial draw: {e}")))?
            .sample(&mut ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_A5A5_A5A5_A5A5));
        res.shot_retention = Some(kept as f64 / cfg.shots as f64);
        kept
    } else {
        cfg.shots
    };
    if shots == 0 {
        res.error = Some(Error::EmptyPostselection(0.0).to_string() + " (no shots kept)");
        return Ok(res);
    }

    let readout = calibration.filter(|_| v.noisy);
    let counts: Counts = match readout {
        Some(cal) => apply_readout_error(&probs, cal, shots, seed)?,
        None => sample_counts(&probs, shots, seed)?,
    };
    let stats: SampleStats = match (v.meas_em, readout) {
        (true, Some(cal)) => distribution_statistics(&mitigate_counts(&counts, cal)?, ctx.diag),
        _ => sample_statistics(&counts, ctx.diag)?,
    };
    res.sample_mean = Some(stats.mean);
    res.sample_std = Some(stats.stddev);
    res.pr_opt = Some(stats.pr_opt);
    Ok(res)
}
