//! Experiment orchestration: configuration, the variant grid, and report output.

mod config;
mod report;
mod run;

pub use config::{CouplingKind, CouplingSpec, ExperimentConfig, GraphSpec, NoiseSpec, SvMode, SvPlacement, SvRealization};
pub use report::{OverheadPoint, Report, ReportFormat, build_report, emit_report, format_g10, render_report};
pub use run::{ExperimentResult, run_experiment, run_experiment_on, verification_gate_counts};
