//! QAOA circuits for MaxCut, their objective, and parameter search.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::maxcut::{Graph, ObjectiveDiagonal};
use crate::nelder_mead::{self, NelderMeadOptions};
use crate::state::{Counts, QuantumState};

/// Layer angles in radians: `gammas[k]` drives the phase separator, `betas[k]` the mixer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(Error::config(format!(
                "need equal, nonzero numbers of betas and gammas (got {} and {})",
                betas.len(),
                gammas.len()
            )));
        }
        Ok(Self { betas, gammas })
    }

    pub fn zeros(p: usize) -> Self {
        Self {
            betas: vec![0.0; p],
            gammas: vec![0.0; p],
        }
    }

    pub fn p(&self) -> usize {
        self.betas.len()
    }

    /// Flat `[γ_1..γ_p, β_1..β_p]` layout used by the optimizer.
    fn to_flat(&self) -> Vec<f64> {
        self.gammas.iter().chain(&self.betas).copied().collect()
    }

    fn from_flat(x: &[f64]) -> Self {
        let p = x.len() / 2;
        Self {
            gammas: x[..p].to_vec(),
            betas: x[p..].to_vec(),
        }
    }

    /// Wraps γ into `[0, 2π)` and β into `[0, π)`; the objective has those periods.
    pub fn normalized(&self) -> Self {
        Self {
            gammas: self.gammas.iter().map(|g| g.rem_euclid(2.0 * PI)).collect(),
            betas: self.betas.iter().map(|b| b.rem_euclid(PI)).collect(),
        }
    }
}

/// `H^⊗n`, then per layer `RZZ(-γ)` on each edge (ascending) and `RX(2β)` on each qubit.
///
/// `RZZ(-γ) = exp(iγ/2 Z⊗Z)` equals `exp(-iγ (I - Z⊗Z)/2)` up to global phase.
pub fn build_qaoa_circuit(g: &Graph, params: &QaoaParams) -> Result<Circuit> {
    let n = g.n_nodes();
    let mut circ = Circuit::new(n);
    circ.extend((0..n).map(GateOp::h))?;
    for k in 0..params.p() {
        append_layer(&mut circ, g, params.gammas[k], params.betas[k])?;
    }
    Ok(circ)
}

/// One phase-separator plus mixer layer.
pub(crate) fn append_layer(circ: &mut Circuit, g: &Graph, gamma: f64, beta: f64) -> Result<()> {
    circ.extend(g.edges().iter().map(|&(j, k)| GateOp::rzz(j, k, -gamma)))?;
    circ.extend((0..g.n_nodes()).map(|q| GateOp::rx(q, 2.0 * beta)))
}

/// Noiseless `⟨C⟩` from a statevector simulation of the QAOA circuit.
pub fn exact_expectation(g: &Graph, params: &QaoaParams) -> Result<f64> {
    let diag = g.objective_diagonal()?;
    expectation_with(&diag, g, params)
}

fn expectation_with(diag: &ObjectiveDiagonal, g: &Graph, params: &QaoaParams) -> Result<f64> {
    let state = build_qaoa_circuit(g, params)?.simulate::<f64>()?;
    Ok(diag.expectation(&state.probabilities()))
}

/// Parameter-search budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Grid resolution per axis for the depth-1 scan.
    pub grid_points: usize,
    /// Random starts for depth ≥ 2 (in addition to the warm start).
    pub n_starts: usize,
    /// Simplex-diameter tolerance of the local refinement, in radians.
    pub refine_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points: 24,
            n_starts: 64,
            refine_tol: 1e-6,
            seed: 7,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::config("optimizer grid_points must be at least 2"));
        }
        if self.refine_tol.is_nan() || self.refine_tol <= 0.0 {
            return Err(Error::config("optimizer refine_tol must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizedParams {
    pub params: QaoaParams,
    pub expectation: f64,
}

const DEPTH1_REFINED_STARTS: usize = 8;
const TIE_TOLERANCE: f64 = 1e-8;

/// Multistart search for parameters maximizing noiseless `⟨C⟩`.
///
/// Depth 1 scans a grid and refines the best grid points. Deeper circuits
/// refine the depth `p-1` optimum padded with an identity layer plus
/// `n_starts` uniform random starts, so the optimum never decreases with `p`.
/// Among results within `1e-8` of the best value, the lexicographically
/// smallest normalized `[γ.., β..]` vector wins.
pub fn optimize_parameters(g: &Graph, p: usize, cfg: &OptimizerConfig) -> Result<OptimizedParams> {
    let mut ladder = optimize_up_to(g, p, cfg)?;
    Ok(ladder.pop().expect("p >= 1"))
}

/// Optima for every depth `1..=p_max`, each warm-started from the previous one.
pub fn optimize_up_to(g: &Graph, p_max: usize, cfg: &OptimizerConfig) -> Result<Vec<OptimizedParams>> {
    if p_max == 0 {
        return Err(Error::config("QAOA depth must be at least 1"));
    }
    cfg.validate()?;
    let diag = g.objective_diagonal()?;
    let mut ladder: Vec<OptimizedParams> = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let next = optimize_depth(&diag, g, p, ladder.last(), cfg)?;
        ladder.push(next);
    }
    Ok(ladder)
}

fn optimize_depth(
    diag: &ObjectiveDiagonal,
    g: &Graph,
    p: usize,
    prev: Option<&OptimizedParams>,
    cfg: &OptimizerConfig,
) -> Result<OptimizedParams> {
    let starts: Vec<Vec<f64>> = match prev {
        None => grid_starts(diag, g, cfg)?,
        Some(prev) => {
            let mut warm = prev.params.clone();
            warm.gammas.push(0.0);
            warm.betas.push(0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(p as u64));
            let mut starts = vec![warm.to_flat()];
            starts.extend((0..cfg.n_starts).map(|_| {
                let mut x: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
                x.extend((0..p).map(|_| rng.random_range(0.0..PI)));
                x
            }));
            starts
        }
    };

    let opts = NelderMeadOptions {
        xtol: cfg.refine_tol,
        ..Default::default()
    };
    let refined: Vec<(QaoaParams, f64)> = starts
        .par_iter()
        .map(|x0| {
            let objective = |x: &[f64]| -expectation_with(diag, g, &QaoaParams::from_flat(x)).unwrap_or(f64::NEG_INFINITY);
            let m = nelder_mead::minimize(objective, x0, opts);
            let params = QaoaParams::from_flat(&m.x).normalized();
            let value = expectation_with(diag, g, &params)?;
            Ok((params, value))
        })
        .collect::<Result<_>>()?;

    let best = refined.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    let (params, expectation) = refined
        .into_iter()
        .filter(|(_, v)| *v >= best - TIE_TOLERANCE)
        .min_by(|(a, _), (b, _)| {
            a.to_flat()
                .iter()
                .zip(b.to_flat())
                .map(|(x, y)| x.total_cmp(&y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("at least one start");
    Ok(OptimizedParams { params, expectation })
}

fn grid_starts(diag: &ObjectiveDiagonal, g: &Graph, cfg: &OptimizerConfig) -> Result<Vec<Vec<f64>>> {
    let m = cfg.grid_points;
    let points: Vec<(f64, f64)> = (0..m)
        .flat_map(|i| (0..m).map(move |j| (2.0 * PI * i as f64 / m as f64, PI * j as f64 / m as f64)))
        .collect();
    let mut scored: Vec<(f64, usize)> = points
        .par_iter()
        .enumerate()
        .map(|(idx, &(gamma, beta))| {
            let v = expectation_with(diag, g, &QaoaParams::new(vec![beta], vec![gamma])?)?;
            Ok((v, idx))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored
        .iter()
        .take(DEPTH1_REFINED_STARTS)
        .map(|&(_, idx)| vec![points[idx].0, points[idx].1])
        .collect())
}

/// Summary of sampled objective values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    /// Bessel-corrected standard deviation of `f` over shots (0 for a single shot).
    pub stddev: f64,
    /// Fraction of shots landing on a maximizer.
    pub pr_opt: f64,
}

pub fn sample_statistics(counts: &Counts, diag: &ObjectiveDiagonal) -> Result<SampleStats> {
    let shots = counts.shots();
    if shots == 0 {
        return Err(Error::usage("cannot summarize an empty measurement record"));
    }
    if counts.n_qubits() != diag.n_qubits() {
        return Err(Error::usage("counts and objective disagree on qubit count"));
    }
    let n = shots as f64;
    let f = diag.values();
    let mean = counts.iter().map(|(x, c)| c as f64 * f[x]).sum::<f64>() / n;
    let ss = counts.iter().map(|(x, c)| c as f64 * (f[x] - mean).powi(2)).sum::<f64>();
    let stddev = if shots > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
    let hits: u64 = counts.iter().filter(|&(x, _)| diag.is_maximizer(x)).map(|(_, c)| c).sum();
    Ok(SampleStats {
        mean,
        stddev,
        pr_opt: hits as f64 / n,
    })
}

/// Same statistics for a (quasi-)probability vector, e.g. after readout mitigation.
pub fn distribution_statistics(probs: &[f64], diag: &ObjectiveDiagonal) -> SampleStats {
    let mean = diag.expectation(probs);
    let var: f64 = probs.iter().zip(diag.values()).map(|(p, f)| p * (f - mean).powi(2)).sum();
    SampleStats {
        mean,
        stddev: var.max(0.0).sqrt(),
        pr_opt: diag.optimal_probability(probs),
    }
}
