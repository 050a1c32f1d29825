//! Random-walk positional encoding: p-step return probabilities.

use ndarray::Array2;

use crate::error::Result;
use crate::fmap::SignalMatrix;
use crate::graph::Graph;

/// Default feature count when a config leaves it unspecified.
pub const DEFAULT_RWPE_DIMS: usize = 16;

/// `n x d` matrix whose column `p` (1-based) holds `diag((D^-1 A)^p)`, the
/// probability of returning to the start node after `p` random-walk steps.
/// Requires every node to have at least one neighbor.
pub fn rw_positional_encoding(g: &Graph, d: usize) -> Result<SignalMatrix> {
    if d == 0 {
        return Err(crate::error::Error::InvalidParameter(
            "rwpe feature count must be at least 1".into(),
        ));
    }
    let rows = crate::graph::laplacian::transition_rows(g)?;
    let n = g.node_count();
    // powers accumulated densely; desk-scale n keeps this cheap
    let mut power = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        for &(j, w) in row {
            power[[i, j]] = w;
        }
    }
    let mut out = Array2::zeros((n, d));
    for p in 0..d {
        if p > 0 {
            let mut next = Array2::zeros((n, n));
            for (i, row) in rows.iter().enumerate() {
                for &(j, w) in row {
                    let scaled = &power.row(j) * w;
                    let mut target = next.row_mut(i);
                    target += &scaled;
                }
            }
            power = next;
        }
        for i in 0..n {
            out[[i, p]] = power[[i, i]];
        }
    }
    SignalMatrix::new(out)
}
