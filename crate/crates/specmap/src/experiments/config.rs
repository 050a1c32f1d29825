//! Experiment configuration: graph sources, sweep parameters, seeding.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, Graph, LaplacianKind};
use crate::spectral::KSpec;

/// Where the full graph comes from.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphSource {
    /// Bundled Zachary karate club (34 nodes).
    Karate,
    EdgeList {
        path: PathBuf,
    },
    Path {
        n: usize,
    },
    Grid {
        rows: usize,
        cols: usize,
    },
    ErdosRenyi {
        n: usize,
        p: f64,
        seed: u64,
    },
    RandomGeometric {
        n: usize,
        radius: f64,
        seed: u64,
    },
    PlantedPartition {
        n: usize,
        communities: usize,
        p_in: f64,
        p_out: f64,
        seed: u64,
    },
}

impl GraphSource {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphSource::Karate => Ok(graph::karate()),
            GraphSource::EdgeList { path } => graph::load_edge_list(path),
            GraphSource::Path { n } => Ok(graph::path_graph(*n)),
            GraphSource::Grid { rows, cols } => Ok(graph::grid_graph(*rows, *cols)),
            GraphSource::ErdosRenyi { n, p, seed } => Ok(graph::erdos_renyi(*n, *p, *seed)),
            GraphSource::RandomGeometric { n, radius, seed } => {
                Ok(graph::random_geometric(*n, *radius, *seed))
            }
            GraphSource::PlantedPartition {
                n,
                communities,
                p_in,
                p_out,
                seed,
            } => Ok(graph::planted_partition(*n, *communities, *p_in, *p_out, *seed)),
        }
    }
}

/// Subgraph family used when building graph/subgraph pairs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum PartialityKind {
    /// BFS ball from a random seed node ("patch").
    #[default]
    Khop,
    /// Random closed neighborhoods removed ("holes").
    Holes,
    /// Remove all nodes of one class; needs a label file.
    ClassRemoval,
}

/// One configuration drives all three experiment pipelines; fields a
/// pipeline does not use are ignored by it.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Edge-list file; takes precedence over `graph` when both are given.
    #[serde(default)]
    pub graph_path: Option<PathBuf>,
    #[serde(default)]
    pub graph: Option<GraphSource>,
    #[serde(default)]
    pub laplacian_kind: LaplacianKind,
    /// Basis sizes swept by the transfer and matching pipelines.
    #[serde(default = "defaults::k_spec")]
    pub k_spec: Vec<KSpec>,
    #[serde(default)]
    pub partiality: PartialityKind,
    /// Node fraction kept by the subgraph in the rewiring and transfer
    /// pipelines.
    #[serde(default = "defaults::subgraph_fraction")]
    pub subgraph_fraction: f64,
    /// Node fractions swept by the matching pipeline.
    #[serde(default = "defaults::partiality_levels")]
    pub partiality_levels: Vec<f64>,
    /// Rewired-edge fractions; default 3%..30% in 3% steps.
    #[serde(default = "defaults::rewire_fractions")]
    pub rewire_fractions: Vec<f64>,
    /// Hop limit for rewiring additions (global rewiring when absent).
    #[serde(default)]
    pub max_hop: Option<usize>,
    #[serde(default = "defaults::noise_sigma")]
    pub noise_sigma: f64,
    /// Baseline map size (square) for the rewiring pipeline.
    #[serde(default = "defaults::map_k")]
    pub map_k: usize,
    #[serde(default = "defaults::rwpe_dims")]
    pub rwpe_dims: usize,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default = "defaults::n_seeds")]
    pub n_seeds: usize,
    /// Restrict the loaded graph to its largest connected component first.
    #[serde(default)]
    pub largest_component: bool,
    /// Also run the estimated-map branch of the matching pipeline.
    #[serde(default)]
    pub estimate: bool,
    #[serde(default = "defaults::landmarks")]
    pub landmarks: usize,
    #[serde(default = "defaults::mu_mask")]
    pub mu_mask: f64,
    #[serde(default = "defaults::zoomout_step")]
    pub zoomout_step: usize,
    /// `node_label class_label` lines; enables class-removal partiality.
    #[serde(default)]
    pub class_labels_path: Option<PathBuf>,
    /// Class removed by class-removal partiality.
    #[serde(default)]
    pub remove_class: Option<String>,
    /// Output directory; a CLI `--out` flag overrides it.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

mod defaults {
    use crate::spectral::KSpec;

    pub fn k_spec() -> Vec<KSpec> {
        vec![
            KSpec::Percent(1.0),
            KSpec::Percent(10.0),
            KSpec::Percent(30.0),
            KSpec::Percent(75.0),
        ]
    }

    pub fn subgraph_fraction() -> f64 {
        0.6
    }

    pub fn partiality_levels() -> Vec<f64> {
        vec![0.9, 0.8, 0.7, 0.6, 0.5]
    }

    pub fn rewire_fractions() -> Vec<f64> {
        (1..=10).map(|i| 0.03 * i as f64).collect()
    }

    pub fn noise_sigma() -> f64 {
        0.2
    }

    pub fn map_k() -> usize {
        50
    }

    pub fn rwpe_dims() -> usize {
        crate::spectral::DEFAULT_RWPE_DIMS
    }

    pub fn n_seeds() -> usize {
        1
    }

    pub fn landmarks() -> usize {
        50
    }

    pub fn mu_mask() -> f64 {
        1e-3
    }

    pub fn zoomout_step() -> usize {
        2
    }
}

impl ExperimentConfig {
    /// Minimal config over a named graph source, otherwise all defaults.
    pub fn for_source(source: GraphSource) -> Self {
        serde_json::from_value(serde_json::json!({
            "graph": serde_json::to_value(&source).expect("source serializes"),
        }))
        .expect("defaults fill the rest")
    }

    pub fn validate(&self) -> Result<()> {
        if self.graph_path.is_none() && self.graph.is_none() {
            return Err(Error::InvalidConfig(
                "one of graph_path or graph must be set".into(),
            ));
        }
        if self.k_spec.is_empty() {
            return Err(Error::InvalidConfig("k_spec must be non-empty".into()));
        }
        for k in &self.k_spec {
            let valid = match *k {
                KSpec::Absolute(v) => v >= 1,
                KSpec::Percent(p) => p > 0.0 && p <= 100.0,
            };
            if !valid {
                return Err(Error::InvalidConfig(format!("invalid k_spec entry {k}")));
            }
        }
        if self.rewire_fractions.is_empty() {
            return Err(Error::InvalidConfig("rewire_fractions must be non-empty".into()));
        }
        for &f in &self.rewire_fractions {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "rewire fraction {f} not in (0, 1]"
                )));
            }
        }
        if !(self.subgraph_fraction > 0.0 && self.subgraph_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "subgraph_fraction {} not in (0, 1]",
                self.subgraph_fraction
            )));
        }
        if self.partiality_levels.is_empty() {
            return Err(Error::InvalidConfig("partiality_levels must be non-empty".into()));
        }
        for &l in &self.partiality_levels {
            if !(l > 0.0 && l <= 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "partiality level {l} not in (0, 1]"
                )));
            }
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::InvalidConfig("noise_sigma must be non-negative".into()));
        }
        if self.map_k == 0 || self.rwpe_dims == 0 || self.n_seeds == 0 || self.zoomout_step == 0 {
            return Err(Error::InvalidConfig(
                "map_k, rwpe_dims, n_seeds and zoomout_step must be positive".into(),
            ));
        }
        if self.estimate && self.landmarks == 0 {
            return Err(Error::InvalidConfig("landmarks must be positive".into()));
        }
        if self.mu_mask < 0.0 {
            return Err(Error::InvalidConfig("mu_mask must be non-negative".into()));
        }
        if self.partiality == PartialityKind::ClassRemoval
            && self.class_labels_path.is_some()
            && self.remove_class.is_none()
        {
            return Err(Error::InvalidConfig(
                "class removal needs remove_class when labels are given".into(),
            ));
        }
        Ok(())
    }

    /// Builds the full graph, applying the largest-component filter when
    /// requested.
    pub fn load_graph(&self) -> Result<Graph> {
        let g = if let Some(path) = &self.graph_path {
            graph::load_edge_list(path)?
        } else {
            self.graph
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("no graph source".into()))?
                .build()?
        };
        if self.largest_component {
            let (lcc, _) = graph::largest_component(&g)?;
            Ok(lcc)
        } else {
            Ok(g)
        }
    }
}

/// FNV-1a hash of the canonical JSON form of the config; stamped on every
/// result row and into the snapshot file.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in json.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// Snapshot document: the config plus its hash, written next to results.
#[derive(Debug, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub hash: String,
    pub config: ExperimentConfig,
}

impl ConfigSnapshot {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        Self {
            hash: config_hash(cfg),
            config: cfg.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }
}
