use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("self-loop ({node}, {node}) at line {line}")]
    SelfLoop { line: usize, node: String },

    #[error("edge list is empty")]
    EmptyEdgeList,

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graphs have different node sets ({0} vs {1} nodes)")]
    NodeSetMismatch(usize, usize),

    #[error("correspondence is not injective: nodes {0} and {1} share target {2}")]
    NotInjective(usize, usize, usize),

    #[error("subgraph is empty")]
    EmptySubgraph,

    #[error("could not sample {needed} absent edges ({attempts} attempts)")]
    InsufficientAbsentEdges { needed: usize, attempts: usize },

    #[error("matrix is not symmetric: |a[{i},{j}] - a[{j},{i}]| = {delta:e}")]
    NotSymmetric { i: usize, j: usize, delta: f64 },

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("signal contains a non-finite entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),

    #[error("graph has an isolated node (index {0})")]
    IsolatedNode(usize),

    #[error("linear system is rank-deficient and no regularization was requested")]
    RankDeficient,

    #[error("true match for query node {0} missing from its candidate list")]
    TrueMatchMissing(usize),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("unsupported file format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
