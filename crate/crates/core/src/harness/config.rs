use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxcut::{BenchmarkGraph, Graph};
use crate::noise::{NoiseConfig, NoiseModel};
use crate::qaoa::OptimizerConfig;
use crate::transpile::Layout;

/// A benchmark name, a path to a graph JSON file, or an inline `{"n", "edges"}` object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Name(String),
    Inline(Graph),
}

impl GraphSpec {
    /// Label used in reports, and the graph itself. Relative paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>) -> Result<(String, Graph)> {
        match self {
            GraphSpec::Inline(g) => Ok(("custom".to_owned(), g.clone())),
            GraphSpec::Name(name) => {
                if let Ok(b) = name.parse::<BenchmarkGraph>() {
                    return Ok((b.name().to_owned(), b.graph()));
                }
                let path = PathBuf::from(name);
                let path = match base {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path,
                };
                if !path.exists() {
                    return Err(Error::config(format!(
                        "graph {name:?} is neither a benchmark name nor an existing file"
                    )));
                }
                let label = path.file_stem().map_or_else(|| name.clone(), |s| s.to_string_lossy().into_owned());
                Ok((label, Graph::from_json_file(&path)?))
            }
        }
    }
}

/// `"none"`, `"representative"`, or an explicit noise object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoiseSpec {
    Keyword(String),
    Model(NoiseConfig),
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::Keyword("none".to_owned())
    }
}

impl NoiseSpec {
    pub fn resolve(&self) -> Result<Option<NoiseModel>> {
        match self {
            NoiseSpec::Keyword(k) if k == "none" => Ok(None),
            NoiseSpec::Keyword(k) if k == "representative" => Ok(Some(NoiseModel::representative())),
            NoiseSpec::Keyword(k) => Err(Error::config(format!(
                "unknown noise keyword {k:?} (expected \"none\", \"representative\" or an object)"
            ))),
            NoiseSpec::Model(cfg) => NoiseModel::try_from(cfg).map(Some),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvMode {
    #[default]
    None,
    Bitflip,
    Permutation,
    Both,
}

impl SvMode {
    pub fn name(self) -> &'static str {
        match self {
            SvMode::None => "none",
            SvMode::Bitflip => "bitflip",
            SvMode::Permutation => "permutation",
            SvMode::Both => "both",
        }
    }

    /// The verification settings run for this mode; `none` is always included as the baseline.
    pub fn variants(self) -> Vec<SvMode> {
        match self {
            SvMode::None => vec![SvMode::None],
            SvMode::Bitflip => vec![SvMode::None, SvMode::Bitflip],
            SvMode::Permutation => vec![SvMode::None, SvMode::Permutation],
            SvMode::Both => vec![SvMode::None, SvMode::Bitflip, SvMode::Permutation, SvMode::Both],
        }
    }
}

impl fmt::Display for SvMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvRealization {
    #[default]
    IdealProjection,
    AncillaCircuit,
}

impl SvRealization {
    pub fn name(self) -> &'static str {
        match self {
            SvRealization::IdealProjection => "ideal_projection",
            SvRealization::AncillaCircuit => "ancilla_circuit",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SvPlacement {
    #[default]
    End,
    AfterEachLayer,
}

impl SvPlacement {
    pub fn name(self) -> &'static str {
        match self {
            SvPlacement::End => "end",
            SvPlacement::AfterEachLayer => "after_each_layer",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    #[default]
    All,
    Linear,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum CouplingRepr {
    #[default]
    Missing,
    Kind(CouplingKind),
    Full {
        kind: CouplingKind,
        #[serde(default)]
        layout: Option<Vec<usize>>,
    },
}

/// `"all"`, `"linear"`, or `{"kind": "linear", "layout": [...]}` where `layout[q]`
/// is the chain position of logical qubit `q`. Verification ancillas go after the data qubits.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "CouplingRepr", into = "CouplingRepr")]
pub struct CouplingSpec {
    pub kind: CouplingKind,
    pub layout: Option<Vec<usize>>,
}

impl From<CouplingRepr> for CouplingSpec {
    fn from(r: CouplingRepr) -> Self {
        match r {
            CouplingRepr::Missing => CouplingSpec::default(),
            CouplingRepr::Kind(kind) => CouplingSpec { kind, layout: None },
            CouplingRepr::Full { kind, layout } => CouplingSpec { kind, layout },
        }
    }
}

impl From<CouplingSpec> for CouplingRepr {
    fn from(c: CouplingSpec) -> Self {
        match c.layout {
            None => CouplingRepr::Kind(c.kind),
            Some(layout) => CouplingRepr::Full {
                kind: c.kind,
                layout: Some(layout),
            },
        }
    }
}

impl CouplingSpec {
    pub fn linear() -> Self {
        CouplingSpec {
            kind: CouplingKind::Linear,
            layout: None,
        }
    }

    /// Data-qubit layout: the configured one or the documented default.
    pub fn data_layout(&self, g: &Graph) -> Result<Layout> {
        let n = g.n_nodes();
        match &self.layout {
            None => Ok(Layout::default_for(g, n)),
            Some(pos) => {
                if pos.len() != n || pos.iter().any(|&p| p >= n) {
                    return Err(Error::config(format!("layout {pos:?} is not a placement of {n} qubits")));
                }
                Layout::new(pos.clone())
            }
        }
    }
}

/// One experiment: a graph, a set of depths, and the variant grid to run on each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub p_values: Vec<usize>,
    pub shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub sv_mode: SvMode,
    #[serde(default)]
    pub sv_realization: SvRealization,
    #[serde(default)]
    pub sv_placement: SvPlacement,
    #[serde(default)]
    pub meas_em: bool,
    #[serde(default)]
    pub coupling: CouplingSpec,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

impl ExperimentConfig {
    /// Defaults for everything but the graph, depths, shots and seed.
    pub fn new(graph: GraphSpec, p_values: Vec<usize>, shots: u64, seed: u64) -> Self {
        Self {
            graph,
            p_values,
            shots,
            seed,
            noise: NoiseSpec::default(),
            sv_mode: SvMode::None,
            sv_realization: SvRealization::IdealProjection,
            sv_placement: SvPlacement::End,
            meas_em: false,
            coupling: CouplingSpec::default(),
            optimizer: OptimizerConfig::default(),
        }
    }

    /// Reads a JSON config; graph file paths are taken relative to the config's directory.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, base))
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() || self.p_values.contains(&0) {
            return Err(Error::config("p_values must be a nonempty list of depths ≥ 1"));
        }
        if self.shots == 0 {
            return Err(Error::config("shots must be at least 1"));
        }
        self.optimizer.validate()?;
        self.noise.resolve()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_full_configs() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"graph": "star4", "p_values": [1, 2], "shots": 100, "seed": 3}"#).unwrap();
        assert_eq!(cfg.noise.resolve().unwrap(), None);
        assert_eq!(cfg.coupling, CouplingSpec::default());
        cfg.validate().unwrap();

        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"graph": {"n": 3, "edges": [[0, 1], [1, 2]]}, "p_values": [1], "shots": 10, "seed": 0,
                "noise": "representative", "sv_mode": "both", "sv_realization": "ancilla_circuit",
                "sv_placement": "after_each_layer", "meas_em": true,
                "coupling": {"kind": "linear", "layout": [1, 0, 2]},
                "optimizer": {"grid_points": 8}}"#,
        )
        .unwrap();
        assert_eq!(cfg.sv_mode, SvMode::Both);
        assert_eq!(cfg.coupling.layout, Some(vec![1, 0, 2]));
        assert_eq!(cfg.optimizer.grid_points, 8);
        assert_eq!(cfg.optimizer.n_starts, OptimizerConfig::default().n_starts);
        let (label, g) = cfg.graph.resolve(None).unwrap();
        assert_eq!((label.as_str(), g.edges().len()), ("custom", 2));

        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |s: &str| serde_json::from_str::<ExperimentConfig>(s).map_err(Error::from).and_then(|c| c.validate());
        assert!(bad(r#"{"graph": "star4", "p_values": [], "shots": 1, "seed": 0}"#).is_err());
        assert!(bad(r#"{"graph": "star4", "p_values": [0], "shots": 1, "seed": 0}"#).is_err());
        assert!(bad(r#"{"graph": "star4", "p_values": [1], "shots": 0, "seed": 0}"#).is_err());
        assert!(bad(r#"{"graph": "star4", "p_values": [1], "shots": 1, "seed": 0, "noise": "loud"}"#).is_err());
        assert!(bad(r#"{"graph": "star4", "p_values": [1], "shots": 1, "seed": 0, "colour": 1}"#).is_err());
        let missing = GraphSpec::Name("no_such_graph.json".into()).resolve(None);
        assert!(matches!(missing, Err(Error::Config(_))));
    }

    #[test]
    fn graph_file_resolves_relative_to_base() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("tri.json"), r#"{"n": 3, "edges": [[0, 1], [1, 2], [0, 2]]}"#).unwrap();
        let (label, g) = GraphSpec::Name("tri.json".into()).resolve(Some(dir.path())).unwrap();
        assert_eq!(label, "tri");
        assert_eq!(g, BenchmarkGraph::Complete3.graph());
    }

    #[test]
    fn layout_validation() {
        let star = BenchmarkGraph::Star4.graph();
        assert_eq!(CouplingSpec::linear().data_layout(&star).unwrap().positions(), &[1, 0, 2, 3]);
        let bad = CouplingSpec {
            kind: CouplingKind::Linear,
            layout: Some(vec![0, 1, 2]),
        };
        assert!(bad.data_layout(&star).is_err());
    }
}
