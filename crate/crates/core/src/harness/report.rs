use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::SvMode;
use super::run::ExperimentResult;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::usage(format!("unknown report format {other:?} (json or csv)"))),
        }
    }
}

/// One verified variant against its unverified baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverheadPoint {
    pub graph: String,
    pub p: usize,
    pub variant: String,
    pub overhead: f64,
    pub fidelity_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub results: Vec<ExperimentResult>,
    pub overhead_scatter: Vec<OverheadPoint>,
}

/// Pairs every successful verified variant with the unverified one of the same
/// graph, depth and noise setting (without readout mitigation).
pub fn build_report(results: &[ExperimentResult]) -> Report {
    let baselines: BTreeMap<(&str, usize, bool), f64> = results
        .iter()
        .filter(|r| r.sv == SvMode::None && !r.meas_em)
        .filter_map(|r| Some(((r.graph.as_str(), r.p, r.noisy), r.fidelity?)))
        .collect();
    let overhead_scatter = results
        .iter()
        .filter(|r| r.sv != SvMode::None && !r.meas_em)
        .filter_map(|r| {
            let base = baselines.get(&(r.graph.as_str(), r.p, r.noisy))?;
            Some(OverheadPoint {
                graph: r.graph.clone(),
                p: r.p,
                variant: r.variant.clone(),
                overhead: r.overhead,
                fidelity_delta: r.fidelity? - base,
            })
        })
        .collect();
    Report {
        results: results.to_vec(),
        overhead_scatter,
    }
}

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 20] = [
    "graph",
    "p",
    "variant",
    "noisy",
    "sv",
    "sv_realization",
    "sv_placement",
    "meas_em",
    "fidelity",
    "expected_C_exact",
    "sample_mean",
    "sample_std",
    "pr_opt",
    "retention",
    "shot_retention",
    "cx_count",
    "overhead",
    "gammas",
    "betas",
    "error",
];

/// `%.10g`: ten significant digits, trailing zeros dropped.
pub fn format_g10(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..10).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (9 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_owned()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.') } else { s }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_g10).unwrap_or_default()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_g10(x)).collect::<Vec<_>>().join(";")
}

fn render_csv(results: &[ExperimentResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in results {
        w.write_record([
            r.graph.clone(),
            r.p.to_string(),
            r.variant.clone(),
            r.noisy.to_string(),
            r.sv.name().to_owned(),
            r.sv_realization.map(|x| x.name().to_owned()).unwrap_or_default(),
            r.sv_placement.map(|x| x.name().to_owned()).unwrap_or_default(),
            r.meas_em.to_string(),
            opt(r.fidelity),
            opt(r.expected_c_exact),
            opt(r.sample_mean),
            opt(r.sample_std),
            opt(r.pr_opt),
            opt(r.retention),
            opt(r.shot_retention),
            r.cx_count.to_string(),
            format_g10(r.overhead),
            join(&r.params_used.gammas),
            join(&r.params_used.betas),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Report text. JSON carries `results` and `overhead_scatter`; CSV carries the results only.
pub fn render_report(results: &[ExperimentResult], format: ReportFormat) -> Result<String> {
    if results.is_empty() {
        return Err(Error::usage("no results to report"));
    }
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&build_report(results))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => render_csv(results),
    }
}

pub fn emit_report(results: &[ExperimentResult], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_report(results, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
