//! Truncated, sign-canonicalized eigenbases of graph Laplacians, plus
//! spectral node features.
//!
//! An [`Eigenbasis`] holds the first `k` eigenpairs of a Laplacian, sorted in
//! non-descending eigenvalue order with orthonormal columns. Eigenvectors are
//! only defined up to sign, so every column is canonicalized: the entry of
//! largest absolute value is made positive (ties broken by lowest row index).
//! Comparisons that must stay sign-invariant regardless live in
//! [`crate::fmap::map_distance`].

pub(crate) mod dense;
pub(crate) mod io;
mod lanczos;
mod rwpe;

pub use io::{read_eigenbasis, write_eigenbasis, write_eigenbasis_csv};
pub use rwpe::{rw_positional_encoding, DEFAULT_RWPE_DIMS};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::LaplacianKind;
use crate::sparse::SparseSymMatrix;

/// Basis size request: an absolute eigenvector count or a percentage of the
/// node count (rounded half-up, floor 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSpec {
    Absolute(usize),
    Percent(f64),
}

impl KSpec {
    pub fn resolve(&self, n: usize) -> usize {
        match *self {
            KSpec::Absolute(k) => k.min(n),
            KSpec::Percent(p) => {
                let k = (p / 100.0 * n as f64 + 0.5).floor() as usize;
                k.max(1).min(n)
            }
        }
    }
}

impl std::fmt::Display for KSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KSpec::Absolute(k) => write!(f, "{k}"),
            KSpec::Percent(p) => write!(f, "{p}%"),
        }
    }
}

impl std::str::FromStr for KSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(p) = s.strip_suffix('%') {
            let v: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad percentage {s:?}")))?;
            if !(v > 0.0 && v <= 100.0) {
                return Err(Error::InvalidParameter(format!(
                    "percentage {v} not in (0, 100]"
                )));
            }
            Ok(KSpec::Percent(v))
        } else {
            let v: usize = s
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad eigenvector count {s:?}")))?;
            Ok(KSpec::Absolute(v))
        }
    }
}

impl Serialize for KSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KSpec::Absolute(k) => ser.serialize_u64(*k as u64),
            KSpec::Percent(p) => ser.serialize_str(&format!("{p}%")),
        }
    }
}

impl<'de> Deserialize<'de> for KSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(k) => Ok(KSpec::Absolute(k as usize)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which eigensolver [`eigendecompose_with`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Dense below [`DENSE_THRESHOLD`] nodes, iterative above.
    Auto,
    /// Full dense decomposition, truncated to `k` pairs.
    Dense,
    /// Shift-invert Lanczos with full reorthogonalization.
    Iterative,
}

/// Node count at which [`Solver::Auto`] switches from dense to iterative.
pub const DENSE_THRESHOLD: usize = 2048;

/// Per-pair residual bound enforced by [`eigendecompose`]:
/// `||L phi - lambda phi|| <= RESIDUAL_TOL * max(1, lambda)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Eigenvalue gap below which consecutive eigenvalues are treated as one
/// multiplicity block.
pub const MULTIPLICITY_GAP: f64 = 1e-6;

/// First-k eigenpairs of a Laplacian: `phi` is `n x k` with orthonormal,
/// sign-canonical columns; `lambda` is non-descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenbasis {
    phi: Array2<f64>,
    lambda: Vec<f64>,
    kind: LaplacianKind,
}

impl Eigenbasis {
    pub(crate) fn from_parts(phi: Array2<f64>, lambda: Vec<f64>, kind: LaplacianKind) -> Self {
        let mut b = Self { phi, lambda, kind };
        b.canonicalize_signs();
        b
    }

    pub fn n(&self) -> usize {
        self.phi.nrows()
    }

    pub fn k(&self) -> usize {
        self.phi.ncols()
    }

    pub fn kind(&self) -> LaplacianKind {
        self.kind
    }

    /// `n x k` eigenvector matrix (columns are eigenfunctions).
    pub fn phi(&self) -> &Array2<f64> {
        &self.phi
    }

    /// Eigenvalues, non-descending.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Basis restricted to its first `k` columns.
    pub fn truncated(&self, k: usize) -> Result<Eigenbasis> {
        if k == 0 || k > self.k() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate a k={} basis to k={k}",
                self.k()
            )));
        }
        Ok(Eigenbasis {
            phi: self.phi.slice(ndarray::s![.., ..k]).to_owned(),
            lambda: self.lambda[..k].to_vec(),
            kind: self.kind,
        })
    }

    /// Maximal runs of consecutive eigenvalues closer than
    /// [`MULTIPLICITY_GAP`]; downstream comparisons should treat columns
    /// inside one block as a subspace, not as individual vectors.
    pub fn multiplicity_blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=self.lambda.len() {
            if i == self.lambda.len() || self.lambda[i] - self.lambda[i - 1] > MULTIPLICITY_GAP {
                blocks.push(start..i);
                start = i;
            }
        }
        blocks
    }

    /// True when the first `k` eigenvalues are pairwise separated by more
    /// than [`MULTIPLICITY_GAP`].
    pub fn has_simple_spectrum(&self) -> bool {
        self.multiplicity_blocks().iter().all(|b| b.len() == 1)
    }

    /// Makes the largest-magnitude entry of each column positive (ties by
    /// lowest row index). Idempotent; preserves orthonormality.
    fn canonicalize_signs(&mut self) {
        for mut col in self.phi.columns_mut() {
            let mut best = 0usize;
            let mut best_abs = 0.0f64;
            for (i, &x) in col.iter().enumerate() {
                if x.abs() > best_abs {
                    best_abs = x.abs();
                    best = i;
                }
            }
            if col[best] < 0.0 {
                col.mapv_inplace(|x| -x);
            }
        }
    }

    /// `max |Phi^T Phi - I|`, for diagnostics and tests.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.phi.t().dot(&self.phi);
        let k = self.k();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[[i, j]] - expect).abs());
            }
        }
        worst
    }
}

/// `k` smallest eigenpairs of a sparse symmetric matrix, with the solver
/// picked by size ([`Solver::Auto`]).
pub fn eigendecompose(l: &SparseSymMatrix, k: usize, kind: LaplacianKind) -> Result<Eigenbasis> {
    eigendecompose_with(l, k, kind, Solver::Auto)
}

/// [`eigendecompose`] with an explicit solver choice. The input is checked
/// symmetric to `1e-10`; every returned pair satisfies the residual bound
/// [`RESIDUAL_TOL`].
pub fn eigendecompose_with(
    l: &SparseSymMatrix,
    k: usize,
    kind: LaplacianKind,
    solver: Solver,
) -> Result<Eigenbasis> {
    let n = l.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested k={k} eigenpairs of an {n}x{n} matrix"
        )));
    }
    l.check_symmetric(1e-10)?;
    let use_dense = match solver {
        Solver::Auto => n <= DENSE_THRESHOLD,
        Solver::Dense => true,
        Solver::Iterative => false,
    };
    let (lambda, phi) = if use_dense {
        let (vals, vecs) = dense::symmetric_eigen(&l.to_dense())?;
        let phi = vecs.slice(ndarray::s![.., ..k]).to_owned();
        (vals[..k].to_vec(), phi)
    } else {
        lanczos::smallest_eigenpairs(l, k, RESIDUAL_TOL)?
    };

    let basis = Eigenbasis::from_parts(phi, lambda, kind);
    // residual guarantee, regardless of path
    for i in 0..k {
        let x: Vec<f64> = basis.phi.column(i).to_vec();
        let lx = l.matvec_owned(&x);
        let mut res = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            let r = lx[j] - basis.lambda[i] * xj;
            res += r * r;
        }
        if res.sqrt() > RESIDUAL_TOL * basis.lambda[i].abs().max(1.0) {
            return Err(Error::ConvergenceFailure(format!(
                "eigenpair {i} residual {:e} above tolerance",
                res.sqrt()
            )));
        }
    }
    Ok(basis)
}
