//! `symqaoa` command-line front end.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 on simulation errors.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Value, json};

use symqaoa::harness::{
    CouplingKind, CouplingSpec, ExperimentConfig, GraphSpec, NoiseSpec, ReportFormat, SvMode, SvPlacement,
    emit_report, render_report, run_experiment_on, verification_gate_counts,
};
use symqaoa::noise::NoiseConfig;
use symqaoa::qaoa::{distribution_statistics, optimize_parameters};
use symqaoa::symmetry::{filter_swap_representable, find_automorphisms, find_bitflip_symmetries};
use symqaoa::{
    Error, Graph, OptimizerConfig, QaoaParams, QuantumState, Result, StateVector, apply_noisy_circuit,
    build_qaoa_circuit, sample_counts, sample_statistics,
};

#[derive(Parser)]
#[command(name = "symqaoa", version, about = "QAOA MaxCut simulation with symmetry verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find QAOA angles maximizing the noiseless expected cut.
    Optimize {
        /// Benchmark name (path3, complete3, star4, kite4) or graph JSON file.
        graph: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().grid_points)]
        grid_points: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().n_starts)]
        n_starts: usize,
        #[arg(long, default_value_t = OptimizerConfig::default().seed)]
        seed: u64,
    },
    /// Simulate one QAOA circuit and sample it.
    Simulate {
        graph: String,
        /// Comma-separated γ values; with --betas, skips optimization.
        #[arg(long, value_delimiter = ',', requires = "betas")]
        gammas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', requires = "gammas")]
        betas: Option<Vec<f64>>,
        /// Depth to optimize at when no angles are given.
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1024)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// "none", "representative", or a noise JSON file.
        #[arg(long, default_value = "none")]
        noise: String,
    },
    /// Run an experiment grid from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// CX counts with and without verification.
    Gatecount {
        graph: String,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum)]
        sv: Option<SvArg>,
        #[arg(long, value_enum, default_value_t = CouplingArg::All)]
        coupling: CouplingArg,
        /// Comma-separated chain position of each data qubit.
        #[arg(long, value_delimiter = ',')]
        layout: Option<Vec<usize>>,
        #[arg(long)]
        after_each_layer: bool,
    },
    /// List bit-flip symmetries and automorphisms of a graph.
    Symmetries { graph: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SvArg {
    Bitflip,
    Perm,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingArg {
    All,
    Linear,
}

fn load_graph(name: &str) -> Result<(String, Graph)> {
    GraphSpec::Name(name.to_owned()).resolve(None)
}

fn load_noise(arg: &str) -> Result<NoiseSpec> {
    if arg == "none" || arg == "representative" {
        return Ok(NoiseSpec::Keyword(arg.to_owned()));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::Io {
        path: arg.into(),
        source: e,
    })?;
    Ok(NoiseSpec::Model(serde_json::from_str::<NoiseConfig>(&text)?))
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn write_stdout(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) -> Result<()> {
    write_stdout(&(serde_json::to_string_pretty(v)? + "\n"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimize {
            graph,
            p,
            grid_points,
            n_starts,
            seed,
        } => {
            let (label, g) = load_graph(&graph)?;
            let cfg = OptimizerConfig {
                grid_points,
                n_starts,
                seed,
                ..Default::default()
            };
            let best = optimize_parameters(&g, p, &cfg)?;
            let max = g.objective_diagonal()?.max_value();
            print_json(&json!({
                "graph": label,
                "p": p,
                "gammas": best.params.gammas,
                "betas": best.params.betas,
                "expectation": best.expectation,
                "approximation_ratio": best.expectation / max,
            }))
        }
        Command::Simulate {
            graph,
            gammas,
            betas,
            p,
            shots,
            seed,
            noise,
        } => {
            let (label, g) = load_graph(&graph)?;
            let params = match (gammas, betas) {
                (Some(gs), Some(bs)) => QaoaParams::new(bs, gs)?,
                _ => optimize_parameters(&g, p, &OptimizerConfig::default())?.params,
            };
            let diag = g.objective_diagonal()?;
            let circ = build_qaoa_circuit(&g, &params)?;
            let reference: StateVector = circ.simulate()?;
            let (probs, fidelity) = match load_noise(&noise)?.resolve()? {
                None => (reference.probabilities(), 1.0),
                Some(nm) => {
                    let rho = apply_noisy_circuit(&circ, &nm, &symqaoa::DensityMatrix::zero(g.n_nodes())?)?;
                    let probs: Vec<f64> = rho.probabilities().iter().map(|p| p.max(0.0)).collect();
                    let total: f64 = probs.iter().sum();
                    (probs.iter().map(|p| p / total).collect(), rho.fidelity_pure(&reference)?)
                }
            };
            let counts = sample_counts(&probs, shots, seed)?;
            let stats = sample_statistics(&counts, &diag)?;
            let exact = distribution_statistics(&probs, &diag);
            print_json(&json!({
                "graph": label,
                "gammas": params.gammas,
                "betas": params.betas,
                "fidelity": fidelity,
                "expected_C_exact": exact.mean,
                "pr_opt_exact": exact.pr_opt,
                "sample_mean": stats.mean,
                "sample_std": stats.stddev,
                "pr_opt": stats.pr_opt,
                "counts": counts.to_bitstring_map(),
            }))
        }
        Command::Experiment { config, out, format } => {
            let (cfg, base) = ExperimentConfig::from_json_file(&config)?;
            let results = run_experiment_on(&cfg, Some(&base))?;
            let format = match format {
                Format::Json => ReportFormat::Json,
                Format::Csv => ReportFormat::Csv,
            };
            match out {
                Some(path) => emit_report(&results, format, path),
                None => write_stdout(&render_report(&results, format)?),
            }
        }
        Command::Gatecount {
            graph,
            p,
            sv,
            coupling,
            layout,
            after_each_layer,
        } => {
            let (label, g) = load_graph(&graph)?;
            let sv = match sv {
                None => SvMode::None,
                Some(SvArg::Bitflip) => SvMode::Bitflip,
                Some(SvArg::Perm) => SvMode::Permutation,
                Some(SvArg::Both) => SvMode::Both,
            };
            let coupling = CouplingSpec {
                kind: match coupling {
                    CouplingArg::All => CouplingKind::All,
                    CouplingArg::Linear => CouplingKind::Linear,
                },
                layout,
            };
            if coupling.kind == CouplingKind::Linear {
                coupling.data_layout(&g)?;
            }
            let placement = if after_each_layer { SvPlacement::AfterEachLayer } else { SvPlacement::End };
            let (base, with, overhead) = verification_gate_counts(&g, p, sv, placement, &coupling)?;
            print_json(&json!({
                "graph": label,
                "p": p,
                "sv": sv.name(),
                "base": base,
                "with_sv": with,
                "overhead": overhead,
            }))
        }
        Command::Symmetries { graph } => {
            let (label, g) = load_graph(&graph)?;
            let bitflips: Vec<String> = find_bitflip_symmetries(&g)?
                .iter()
                .map(|b| symqaoa::state::format_bitstring(b.mask(), g.n_nodes()))
                .collect();
            let autos = find_automorphisms(&g)?;
            let involutions: Vec<Value> = filter_swap_representable(&autos)
                .iter()
                .map(|p| json!({ "perm": p.perm(), "transpositions": p.transpositions() }))
                .collect();
            print_json(&json!({
                "graph": label,
                "bitflip_masks": bitflips,
                "automorphism_count": autos.len(),
                "automorphisms": autos.iter().map(|a| a.perm().to_vec()).collect::<Vec<_>>(),
                "involutions": involutions,
            }))
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_configuration() { 2 } else { 3 })
        }
    }
}
