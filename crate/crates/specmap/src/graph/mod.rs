//! Graph representation, Laplacian construction, and the generators that
//! produce subgraphs, rewirings, and correspondences.
//!
//! Nodes are addressed by their index `0..n`; the index order is the order of
//! first appearance in the source (edge-list file or generator). Labels keep
//! the original identifiers for I/O.

mod generators;
mod io;
pub(crate) mod laplacian;
mod partiality;
mod rewire;

pub use generators::{
    complete_graph, erdos_renyi, grid_graph, karate, path_graph, planted_partition,
    random_geometric, star_graph,
};
pub use io::{load_edge_list, parse_edge_list, write_edge_list};
pub use laplacian::{combinatorial_laplacian, normalized_laplacian, LaplacianKind};
pub use partiality::{holes_subgraph, khop_subgraph, largest_component};
pub use rewire::{edit_fraction, rewire, PerturbationRecord};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fmap::SignalMatrix;

/// Undirected, unweighted graph with stable node identifiers.
///
/// Edges are stored as sorted adjacency lists; no self-loops, no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes labeled `"0".."n-1"` from an edge list.
    /// Duplicate edges (in either orientation) are merged; self-loops are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    /// Same as [`Graph::from_edges`] with caller-supplied labels.
    pub fn with_labels(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::NodeOutOfRange { index: u.max(v), n });
            }
            if u == v {
                return Err(Error::SelfLoop {
                    line: 0,
                    node: labels[u].clone(),
                });
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        let mut m = 0;
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
            m += row.len();
        }
        Ok(Self {
            labels,
            adj,
            m: m / 2,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adj[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    pub fn adjacency_dense(&self) -> Array2<f64> {
        let n = self.node_count();
        let mut a = Array2::zeros((n, n));
        for (u, v) in self.edges() {
            a[[u, v]] = 1.0;
            a[[v, u]] = 1.0;
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in self.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    stack.push(v as usize);
                }
            }
        }
        count == n
    }

    /// Induced subgraph on `keep` (indices into this graph, ascending and
    /// distinct), together with the correspondence back to this graph.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Result<(Graph, NodeCorrespondence)> {
        if keep.is_empty() {
            return Err(Error::EmptySubgraph);
        }
        let n = self.node_count();
        let mut pos = vec![usize::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            if old >= n {
                return Err(Error::NodeOutOfRange { index: old, n });
            }
            pos[old] = new;
        }
        let labels = keep.iter().map(|&old| self.labels[old].clone()).collect();
        let mut edges = Vec::new();
        for (new_u, &old_u) in keep.iter().enumerate() {
            for &old_v in self.neighbors(old_u) {
                let new_v = pos[old_v as usize];
                if new_v != usize::MAX && new_u < new_v {
                    edges.push((new_u, new_v));
                }
            }
        }
        let sub = Graph::with_labels(labels, &edges)?;
        let corr = NodeCorrespondence::new(n, keep.to_vec())?;
        Ok((sub, corr))
    }
}

/// Uniformly random node relabeling of `g`, with the correspondence from the
/// permuted graph back to the original.
pub fn permute_graph(g: &Graph, rng_seed: u64) -> (Graph, NodeCorrespondence) {
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut new_of_old: Vec<usize> = (0..n).collect();
    new_of_old.shuffle(&mut rng);
    let mut old_of_new = vec![0usize; n];
    for (old, &new) in new_of_old.iter().enumerate() {
        old_of_new[new] = old;
    }
    let labels = old_of_new.iter().map(|&old| g.label(old).to_string()).collect();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .map(|(u, v)| (new_of_old[u], new_of_old[v]))
        .collect();
    let permuted = Graph::with_labels(labels, &edges).expect("relabeling preserves validity");
    let corr = NodeCorrespondence::new(n, old_of_new).expect("permutation is injective");
    (permuted, corr)
}

/// Partial injective map from the nodes of a graph G2 to the nodes of a
/// graph G1; as a binary matrix `S` of shape `n1 x n2`, every column sums to
/// exactly 1 and every row sums to at most 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCorrespondence {
    n_source: usize,
    targets: Vec<usize>,
}

impl NodeCorrespondence {
    /// `targets[j]` is the G1 node matched to G2 node `j`; must be injective.
    pub fn new(n_source: usize, targets: Vec<usize>) -> Result<Self> {
        let mut owner = vec![usize::MAX; n_source];
        for (j, &t) in targets.iter().enumerate() {
            if t >= n_source {
                return Err(Error::NodeOutOfRange {
                    index: t,
                    n: n_source,
                });
            }
            if owner[t] != usize::MAX {
                return Err(Error::NotInjective(owner[t], j, t));
            }
            owner[t] = j;
        }
        Ok(Self { n_source, targets })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_source: n,
            targets: (0..n).collect(),
        }
    }

    /// |V1|
    pub fn n_source(&self) -> usize {
        self.n_source
    }

    /// |V2|
    pub fn n_target(&self) -> usize {
        self.targets.len()
    }

    /// G1 node matched to G2 node `j`.
    pub fn target_of(&self, j: usize) -> usize {
        self.targets[j]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Binary matrix of shape `n1 x n2` with `S[i, j] = 1` iff G2 node `j`
    /// corresponds to G1 node `i`.
    pub fn matrix(&self) -> Array2<f64> {
        let mut s = Array2::zeros((self.n_source, self.targets.len()));
        for (j, &i) in self.targets.iter().enumerate() {
            s[[i, j]] = 1.0;
        }
        s
    }

    /// Pulls a signal on G1 back to G2: row `j` of the result is row
    /// `targets[j]` of `f`. This is the ground-truth node-to-node transfer.
    pub fn apply(&self, f: &SignalMatrix) -> Result<SignalMatrix> {
        if f.node_count() != self.n_source {
            return Err(Error::DimensionMismatch(format!(
                "signal has {} rows, correspondence expects {}",
                f.node_count(),
                self.n_source
            )));
        }
        let vals = f.values();
        let mut out = Array2::zeros((self.targets.len(), vals.ncols()));
        for (j, &i) in self.targets.iter().enumerate() {
            out.row_mut(j).assign(&vals.row(i));
        }
        SignalMatrix::new(out)
    }
}
