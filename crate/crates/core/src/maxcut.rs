//! MaxCut instances, their objective, and the benchmark graphs.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::MAX_QUBITS;

/// Undirected simple graph. Edges are stored as `(j, k)` with `j < k`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    #[serde(rename = "n")]
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphFile::deserialize(d)?;
        Graph::new(raw.n, raw.edges.iter().map(|&[j, k]| (j, k))).map_err(serde::de::Error::custom)
    }
}

impl Graph {
    /// Rejects self-loops, duplicates (in either orientation), and out-of-range nodes.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut normalized = Vec::new();
        for (j, k) in edges {
            if j == k {
                return Err(Error::config(format!("self-loop on node {j}")));
            }
            if j >= n_nodes || k >= n_nodes {
                return Err(Error::config(format!("edge ({j},{k}) outside {n_nodes} node(s)")));
            }
            normalized.push((j.min(k), j.max(k)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("duplicate edge"));
        }
        Ok(Self {
            n_nodes,
            edges: normalized,
        })
    }

    /// Reads `{"n": int, "edges": [[j, k], ...]}`.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.edges.binary_search(&(j.min(k), j.max(k))).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(j, k)| j == v || k == v).count()
    }

    /// Number of cut edges for the assignment encoded in a basis index.
    pub fn cut_of_index(&self, x: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(j, k)| ((x >> j) ^ (x >> k)) & 1 == 1)
            .count()
    }

    /// Number of edges `(j, k)` with `x_j ≠ x_k`.
    pub fn cut_value(&self, x: &[bool]) -> Result<usize> {
        if x.len() != self.n_nodes {
            return Err(Error::usage(format!(
                "assignment has {} bits, graph has {} nodes",
                x.len(),
                self.n_nodes
            )));
        }
        Ok(self.edges.iter().filter(|&&(j, k)| x[j] != x[k]).count())
    }

    /// Tabulates the objective over all `2^n` assignments.
    pub fn objective_diagonal(&self) -> Result<ObjectiveDiagonal> {
        if self.n_nodes > MAX_QUBITS {
            return Err(Error::config(format!("{} nodes exceeds the {MAX_QUBITS}-node limit", self.n_nodes)));
        }
        let values: Vec<f64> = (0..1usize << self.n_nodes).map(|x| self.cut_of_index(x) as f64).collect();
        Ok(ObjectiveDiagonal::from_values(values))
    }
}

/// Objective values on every basis state, plus its maximum and maximizers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveDiagonal {
    values: Vec<f64>,
    max_value: f64,
    maximizers: Vec<usize>,
}

impl ObjectiveDiagonal {
    pub fn from_values(values: Vec<f64>) -> Self {
        let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let maximizers = values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v == max_value)
            .map(|(i, _)| i)
            .collect();
        Self {
            values,
            max_value,
            maximizers,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// Maximizing basis indices, ascending.
    pub fn maximizers(&self) -> &[usize] {
        &self.maximizers
    }

    pub fn is_maximizer(&self, x: usize) -> bool {
        self.maximizers.binary_search(&x).is_ok()
    }

    pub fn n_qubits(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    /// `Σ_x p(x) f(x)`.
    pub fn expectation(&self, probs: &[f64]) -> f64 {
        probs.iter().zip(&self.values).map(|(p, f)| p * f).sum()
    }

    /// Total probability on maximizers.
    pub fn optimal_probability(&self, probs: &[f64]) -> f64 {
        self.maximizers.iter().map(|&x| probs[x]).sum()
    }
}

/// The four benchmark instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkGraph {
    Path3,
    Complete3,
    Star4,
    Kite4,
}

impl BenchmarkGraph {
    pub const ALL: [BenchmarkGraph; 4] = [
        BenchmarkGraph::Path3,
        BenchmarkGraph::Complete3,
        BenchmarkGraph::Star4,
        BenchmarkGraph::Kite4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchmarkGraph::Path3 => "path3",
            BenchmarkGraph::Complete3 => "complete3",
            BenchmarkGraph::Star4 => "star4",
            BenchmarkGraph::Kite4 => "kite4",
        }
    }

    pub fn graph(self) -> Graph {
        let (n, edges): (usize, &[(usize, usize)]) = match self {
            BenchmarkGraph::Path3 => (3, &[(0, 1), (1, 2)]),
            BenchmarkGraph::Complete3 => (3, &[(0, 1), (0, 2), (1, 2)]),
            // center is node 0
            BenchmarkGraph::Star4 => (4, &[(0, 1), (0, 2), (0, 3)]),
            // triangle {0,1,2} with pendant 3 hanging off node 2
            BenchmarkGraph::Kite4 => (4, &[(0, 1), (0, 2), (1, 2), (2, 3)]),
        };
        Graph::new(n, edges.iter().copied()).expect("benchmark graphs are well formed")
    }

    /// Smallest depth at which noiseless QAOA solves the instance exactly.
    pub fn p_max(self) -> usize {
        match self {
            BenchmarkGraph::Path3 => 1,
            BenchmarkGraph::Complete3 => 2,
            BenchmarkGraph::Star4 | BenchmarkGraph::Kite4 => 3,
        }
    }
}

impl fmt::Display for BenchmarkGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchmarkGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkGraph::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown benchmark graph {s:?} (expected path3, complete3, star4, kite4)")))
    }
}

/// Looks up `name` as a benchmark graph.
pub fn benchmark_graph(name: &str) -> Result<Graph> {
    Ok(name.parse::<BenchmarkGraph>()?.graph())
}
