//! Graph Laplacians.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::Graph;
use crate::sparse::SparseSymMatrix;

/// Which Laplace operator a basis was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LaplacianKind {
    /// `L = I - D^{-1/2} A D^{-1/2}`, eigenvalues in [0, 2].
    #[default]
    Normalized,
    /// `L = D - A`, row sums zero.
    Combinatorial,
}

impl LaplacianKind {
    pub fn build(self, g: &Graph) -> SparseSymMatrix {
        match self {
            LaplacianKind::Normalized => normalized_laplacian(g),
            LaplacianKind::Combinatorial => combinatorial_laplacian(g),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LaplacianKind::Normalized => "normalized",
            LaplacianKind::Combinatorial => "combinatorial",
        }
    }
}

/// Symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`.
///
/// A degree-0 node gets `D^{-1/2}(i,i) = 0`, so its row is the standard basis
/// row (eigenvalue 1 with a delta eigenvector); a warning is emitted on
/// stderr since the operator is conventionally defined without isolated
/// nodes.
pub fn normalized_laplacian(g: &Graph) -> SparseSymMatrix {
    let n = g.node_count();
    let mut inv_sqrt = vec![0.0; n];
    for (i, slot) in inv_sqrt.iter_mut().enumerate() {
        let d = g.degree(i);
        if d > 0 {
            *slot = 1.0 / (d as f64).sqrt();
        } else {
            eprintln!(
                "specmap: warning: node {} is isolated; its normalized-Laplacian row is e_{}",
                g.label(i),
                i
            );
        }
    }
    let mut triplets = Vec::with_capacity(n + 2 * g.edge_count());
    for i in 0..n {
        triplets.push((i, i, 1.0));
    }
    for (u, v) in g.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        triplets.push((u, v, w));
        triplets.push((v, u, w));
    }
    SparseSymMatrix::from_triplets(n, &triplets).expect("laplacian is symmetric by construction")
}

/// Combinatorial Laplacian `D - A`.
pub fn combinatorial_laplacian(g: &Graph) -> SparseSymMatrix {
    let n = g.node_count();
    let mut triplets = Vec::with_capacity(n + 2 * g.edge_count());
    for i in 0..n {
        triplets.push((i, i, g.degree(i) as f64));
    }
    for (u, v) in g.edges() {
        triplets.push((u, v, -1.0));
        triplets.push((v, u, -1.0));
    }
    SparseSymMatrix::from_triplets(n, &triplets).expect("laplacian is symmetric by construction")
}

/// Row-normalized transition entries `P = D^{-1} A` as triplets; used by the
/// random-walk positional encoding. Errors on isolated nodes.
pub(crate) fn transition_rows(g: &Graph) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = g.node_count();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let d = g.degree(i);
        if d == 0 {
            return Err(crate::error::Error::IsolatedNode(i));
        }
        let w = 1.0 / d as f64;
        rows.push(g.neighbors(i).iter().map(|&j| (j as usize, w)).collect());
    }
    Ok(rows)
}
