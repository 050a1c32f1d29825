//! # specmap
//!
//! Spectral maps between a graph and its (possibly perturbed) subgraphs.
//!
//! A node-to-node correspondence between two graphs is classically a binary
//! matrix whose size scales with the node counts. Expressed in truncated
//! Laplacian eigenbases it becomes a small coefficient matrix
//! `C = Phi_2^T S Phi_1` that is cheap to store, transfers node signals
//! through `g = Phi_2 C Phi_1^T f`, and degrades gracefully under edge
//! rewiring and partiality.
//!
//! The crate covers the full desk-scale workflow:
//!
//! - [`graph`]: graph loading, Laplacians, subgraph/rewiring/permutation
//!   generators and correspondences;
//! - [`spectral`]: truncated sign-canonical eigenbases (dense or iterative
//!   solver) and random-walk positional encodings;
//! - [`fmap`]: map construction, signal transfer, normalization, and
//!   sign-invariant map distances;
//! - [`matching`]: map estimation from descriptors, node-map recovery,
//!   ZoomOut refinement, retrieval scoring;
//! - [`experiments`]: seeded rewiring-robustness, transfer-RMSE and
//!   matching-MAP pipelines behind the `specmap` CLI.
//!
//! ```
//! use specmap::graph::{karate, khop_subgraph, normalized_laplacian, LaplacianKind};
//! use specmap::spectral::eigendecompose;
//! use specmap::fmap::compute_spectral_map;
//!
//! let g = karate();
//! let (sub, corr) = khop_subgraph(&g, 0, 17)?;
//! let b1 = eigendecompose(&normalized_laplacian(&g), 10, LaplacianKind::Normalized)?;
//! let b2 = eigendecompose(&normalized_laplacian(&sub), 10, LaplacianKind::Normalized)?;
//! let c = compute_spectral_map(&corr, &b1, &b2)?;
//! assert_eq!((c.k2(), c.k1()), (10, 10));
//! # Ok::<(), specmap::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod fmap;
pub mod graph;
mod linalg;
pub mod matching;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};

// The book chapters double as doctests so their snippets cannot rot.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/ch01-graphs-and-laplacians.md")]
    mod ch01_graphs_and_laplacians {}
    #[doc = include_str!("../../../book/src/ch02-eigenbases.md")]
    mod ch02_eigenbases {}
    #[doc = include_str!("../../../book/src/ch03-spectral-maps.md")]
    mod ch03_spectral_maps {}
    #[doc = include_str!("../../../book/src/ch04-matching-and-refinement.md")]
    mod ch04_matching_and_refinement {}
    #[doc = include_str!("../../../book/src/ch05-experiments-and-cli.md")]
    mod ch05_experiments_and_cli {}
}
