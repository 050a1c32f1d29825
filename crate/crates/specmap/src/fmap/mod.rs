//! Spectral maps: construction from correspondences, signal transfer, and
//! sign-invariant comparison.
//!
//! A map `C` between a graph G1 (basis `Phi_1`, `k_1` columns) and a graph
//! G2 (basis `Phi_2`, `k_2` columns) is the `k_2 x k_1` matrix expressing a
//! node correspondence in the truncated eigenbases. At full rank the map and
//! the binary correspondence matrix carry the same information; truncation
//! band-limits it.

mod io;

pub use io::{read_spectral_map, read_spectral_map_csv, write_spectral_map, write_spectral_map_csv};

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LaplacianKind, NodeCorrespondence};
use crate::spectral::Eigenbasis;

/// Node-indexed real feature matrix: one row per node, one column per
/// function.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    values: Array2<f64>,
}

impl SignalMatrix {
    /// Validates that every entry is finite.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        for ((i, j), &v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry(i, j));
            }
        }
        Ok(Self { values })
    }

    pub fn from_column(col: Vec<f64>) -> Result<Self> {
        let n = col.len();
        Self::new(Array2::from_shape_vec((n, 1), col).expect("shape matches"))
    }

    pub fn node_count(&self) -> usize {
        self.values.nrows()
    }

    pub fn dims(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

/// How a map was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapSource {
    GroundTruth,
    Estimated,
    Refined,
}

impl MapSource {
    pub fn as_str(self) -> &'static str {
        match self {
            MapSource::GroundTruth => "ground_truth",
            MapSource::Estimated => "estimated",
            MapSource::Refined => "refined",
        }
    }
}

impl std::str::FromStr for MapSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ground_truth" => Ok(MapSource::GroundTruth),
            "estimated" => Ok(MapSource::Estimated),
            "refined" => Ok(MapSource::Refined),
            other => Err(Error::UnsupportedFormat(format!("map source {other:?}"))),
        }
    }
}

/// Provenance of one side of a map: the basis it was built against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisMeta {
    pub n: usize,
    pub k: usize,
    pub kind: LaplacianKind,
}

impl BasisMeta {
    pub fn of(b: &Eigenbasis) -> Self {
        Self {
            n: b.n(),
            k: b.k(),
            kind: b.kind(),
        }
    }

    fn matches(&self, b: &Eigenbasis) -> bool {
        self.n == b.n() && self.k == b.k() && self.kind == b.kind()
    }
}

/// `k_2 x k_1` spectral map coefficient matrix with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMap {
    c: Array2<f64>,
    basis1: BasisMeta,
    basis2: BasisMeta,
    source: MapSource,
}

impl SpectralMap {
    pub fn from_parts(
        c: Array2<f64>,
        basis1: BasisMeta,
        basis2: BasisMeta,
        source: MapSource,
    ) -> Result<Self> {
        if c.nrows() != basis2.k || c.ncols() != basis1.k {
            return Err(Error::DimensionMismatch(format!(
                "map is {}x{}, provenance says {}x{}",
                c.nrows(),
                c.ncols(),
                basis2.k,
                basis1.k
            )));
        }
        Ok(Self {
            c,
            basis1,
            basis2,
            source,
        })
    }

    pub fn coefficients(&self) -> &Array2<f64> {
        &self.c
    }

    /// Columns: size of the G1-side basis.
    pub fn k1(&self) -> usize {
        self.c.ncols()
    }

    /// Rows: size of the G2-side basis.
    pub fn k2(&self) -> usize {
        self.c.nrows()
    }

    pub fn basis1_meta(&self) -> BasisMeta {
        self.basis1
    }

    pub fn basis2_meta(&self) -> BasisMeta {
        self.basis2
    }

    pub fn source(&self) -> MapSource {
        self.source
    }

    pub(crate) fn check_bases(&self, b1: &Eigenbasis, b2: &Eigenbasis) -> Result<()> {
        if !self.basis1.matches(b1) || !self.basis2.matches(b2) {
            return Err(Error::DimensionMismatch(
                "bases do not match the map's provenance".into(),
            ));
        }
        Ok(())
    }
}

/// `C = Phi_2^T S Phi_1` for a known node correspondence: entry `(i, j)`
/// correlates eigenfunction `i` of G2 with eigenfunction `j` of G1 at
/// corresponding nodes.
pub fn compute_spectral_map(
    corr: &NodeCorrespondence,
    b1: &Eigenbasis,
    b2: &Eigenbasis,
) -> Result<SpectralMap> {
    if corr.n_source() != b1.n() || corr.n_target() != b2.n() {
        return Err(Error::DimensionMismatch(format!(
            "correspondence is {}x{}, bases have n1={} n2={}",
            corr.n_source(),
            corr.n_target(),
            b1.n(),
            b2.n()
        )));
    }
    let c = map_from_point_map(corr.targets(), b1, b2);
    SpectralMap::from_parts(c, BasisMeta::of(b1), BasisMeta::of(b2), MapSource::GroundTruth)
}

/// Shared kernel of ground-truth map construction and ZoomOut recomputation:
/// `targets[y]` is the G1 node matched to G2 node `y` (not necessarily
/// injective here).
pub(crate) fn map_from_point_map(
    targets: &[usize],
    b1: &Eigenbasis,
    b2: &Eigenbasis,
) -> Array2<f64> {
    // S Phi_1 gathers rows of Phi_1 at the matched nodes
    let mut gathered = Array2::zeros((targets.len(), b1.k()));
    for (y, &x) in targets.iter().enumerate() {
        gathered.row_mut(y).assign(&b1.phi().row(x));
    }
    b2.phi().t().dot(&gathered)
}

/// Transfers a signal from G1 to G2: `g_hat = Phi_2 C Phi_1^T f`.
pub fn transfer_signal(
    map: &SpectralMap,
    b1: &Eigenbasis,
    b2: &Eigenbasis,
    f: &SignalMatrix,
) -> Result<SignalMatrix> {
    map.check_bases(b1, b2)?;
    if f.node_count() != b1.n() {
        return Err(Error::DimensionMismatch(format!(
            "signal has {} rows, G1 has {} nodes",
            f.node_count(),
            b1.n()
        )));
    }
    let coeffs = b1.phi().t().dot(f.values());
    let mapped = map.coefficients().dot(&coeffs);
    SignalMatrix::new(b2.phi().dot(&mapped))
}

/// Standardizes every column to zero mean and unit population standard
/// deviation; constant columns become all-zero.
pub fn normalize_signal(f: &SignalMatrix) -> Result<SignalMatrix> {
    let n = f.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "normalization needs at least 2 nodes".into(),
        ));
    }
    let mut out = f.values().clone();
    for mut col in out.columns_mut() {
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        if std <= 1e-12 {
            col.fill(0.0);
        } else {
            col.mapv_inplace(|v| (v - mean) / std);
        }
    }
    SignalMatrix::new(out)
}

/// Root mean squared error over all entries of two equally-shaped signals.
pub fn rmse(g: &SignalMatrix, g_hat: &SignalMatrix) -> Result<f64> {
    if g.values().dim() != g_hat.values().dim() {
        return Err(Error::DimensionMismatch(format!(
            "signals are {:?} and {:?}",
            g.values().dim(),
            g_hat.values().dim()
        )));
    }
    let diff = g.values() - g_hat.values();
    let count = diff.len().max(1) as f64;
    Ok((diff.mapv(|v| v * v).sum() / count).sqrt())
}

/// Default square map size when nothing else pins one: 5% of the smaller
/// node count, rounded half-up, floored at 10 (and capped at that count).
pub fn default_square_k(n1: usize, n2: usize) -> usize {
    let n = n1.min(n2);
    let k = (0.05 * n as f64 + 0.5).floor() as usize;
    k.max(10).min(n)
}

/// Squared Frobenius distance between two maps, minimized exactly over
/// per-row sign flips: row `i` tracks eigenfunction `i` of the G2 basis,
/// whose sign is arbitrary, so row `i` of `c2` is flipped whenever its dot
/// product with row `i` of `c` is negative.
pub fn map_distance(c: &SpectralMap, c2: &SpectralMap) -> Result<f64> {
    map_distance_raw(c.coefficients(), c2.coefficients())
}

/// [`map_distance`] variant for bases with repeated eigenvalues: inside each
/// flagged multiplicity block of the G2 basis the rows are only defined up
/// to an orthogonal mixing, so the block is aligned by orthogonal Procrustes
/// instead of per-row sign flips. Off by default; callers opt in with the
/// blocks from [`crate::spectral::Eigenbasis::multiplicity_blocks`].
pub fn map_distance_block_aligned(
    c: &SpectralMap,
    c2: &SpectralMap,
    blocks: &[std::ops::Range<usize>],
) -> Result<f64> {
    let a = c.coefficients();
    let b = c2.coefficients();
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "maps are {:?} and {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let mut covered = vec![false; a.nrows()];
    let mut total = 0.0;
    for block in blocks {
        if block.end > a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "block {block:?} exceeds {} rows",
                a.nrows()
            )));
        }
        for i in block.clone() {
            if covered[i] {
                return Err(Error::InvalidParameter(format!(
                    "row {i} appears in more than one block"
                )));
            }
            covered[i] = true;
        }
        let ba = a.slice(ndarray::s![block.clone(), ..]);
        let bb = b.slice(ndarray::s![block.clone(), ..]);
        // min over orthogonal Q of ||A - Q B||_F^2
        //   = ||A||^2 + ||B||^2 - 2 * nuclear_norm(A B^T)
        let m = ba.dot(&bb.t());
        let nuclear = nuclear_norm(&m)?;
        total += ba.iter().map(|&v| v * v).sum::<f64>()
            + bb.iter().map(|&v| v * v).sum::<f64>()
            - 2.0 * nuclear;
    }
    // rows outside every block keep the per-row sign treatment
    for i in (0..a.nrows()).filter(|&i| !covered[i]) {
        let ra = a.row(i);
        let rb = b.row(i);
        let dot: f64 = ra.iter().zip(rb.iter()).map(|(x, y)| x * y).sum();
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        total += ra
            .iter()
            .zip(rb.iter())
            .map(|(x, y)| {
                let d = x - sign * y;
                d * d
            })
            .sum::<f64>();
    }
    Ok(total.max(0.0))
}

/// Sum of singular values, computed from the eigenvalues of `M M^T`.
fn nuclear_norm(m: &Array2<f64>) -> Result<f64> {
    let gram = m.dot(&m.t());
    let (vals, _) = crate::spectral::dense::symmetric_eigen(&gram)?;
    Ok(vals.iter().map(|&v| v.max(0.0).sqrt()).sum())
}

pub(crate) fn map_distance_raw(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "maps are {:?} and {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let mut total = 0.0;
    for (ra, rb) in a.rows().into_iter().zip(b.rows()) {
        let dot: f64 = ra.iter().zip(rb.iter()).map(|(x, y)| x * y).sum();
        let sign = if dot < 0.0 { -1.0 } else { 1.0 };
        total += ra
            .iter()
            .zip(rb.iter())
            .map(|(x, y)| {
                let d = x - sign * y;
                d * d
            })
            .sum::<f64>();
    }
    Ok(total)
}

/// Adds i.i.d. `N(0, sigma^2)` noise to every coefficient; deterministic per
/// seed.
pub fn gaussian_noise_map(map: &SpectralMap, sigma: f64, rng_seed: u64) -> Result<SpectralMap> {
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!("sigma {sigma} < 0")));
    }
    let mut c = map.coefficients().clone();
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let normal = Normal::new(0.0, sigma).expect("sigma validated");
        for v in c.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    SpectralMap::from_parts(c, map.basis1_meta(), map.basis2_meta(), map.source())
}

/// Norm used by [`distillation_loss_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossNorm {
    /// Frobenius norm of the residual (the default reading of the loss).
    #[default]
    Frobenius,
    /// Mean of the squared residual entries.
    MeanSquared,
}

/// Feature-alignment loss `|| C Phi_1^T x_t - Phi_2^T x_s ||_F` between
/// features living on the two graphs.
pub fn distillation_loss(
    map: &SpectralMap,
    b1: &Eigenbasis,
    b2: &Eigenbasis,
    x_t: &SignalMatrix,
    x_s: &SignalMatrix,
) -> Result<f64> {
    distillation_loss_with(map, b1, b2, x_t, x_s, LossNorm::Frobenius)
}

/// [`distillation_loss`] with an explicit choice of norm.
pub fn distillation_loss_with(
    map: &SpectralMap,
    b1: &Eigenbasis,
    b2: &Eigenbasis,
    x_t: &SignalMatrix,
    x_s: &SignalMatrix,
    norm: LossNorm,
) -> Result<f64> {
    map.check_bases(b1, b2)?;
    if x_t.node_count() != b1.n() || x_s.node_count() != b2.n() {
        return Err(Error::DimensionMismatch(format!(
            "features have {} and {} rows, graphs have {} and {} nodes",
            x_t.node_count(),
            x_s.node_count(),
            b1.n(),
            b2.n()
        )));
    }
    if x_t.dims() != x_s.dims() {
        return Err(Error::DimensionMismatch(format!(
            "feature column counts differ: {} vs {}",
            x_t.dims(),
            x_s.dims()
        )));
    }
    let lhs = map.coefficients().dot(&b1.phi().t().dot(x_t.values()));
    let rhs = b2.phi().t().dot(x_s.values());
    let diff = &lhs - &rhs;
    let total = diff.mapv(|v| v * v).sum();
    Ok(match norm {
        LossNorm::Frobenius => total.sqrt(),
        LossNorm::MeanSquared => total / diff.len().max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{karate, khop_subgraph, normalized_laplacian, permute_graph};
    use crate::spectral::eigendecompose;
    use ndarray::array;

    fn basis(g: &crate::graph::Graph, k: usize) -> Eigenbasis {
        eigendecompose(&normalized_laplacian(g), k, LaplacianKind::Normalized).unwrap()
    }

    #[test]
    fn identity_correspondence_gives_identity_map() {
        let g = karate();
        let b = basis(&g, 10);
        let c = compute_spectral_map(&NodeCorrespondence::identity(34), &b, &b).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((c.coefficients()[[i, j]] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn permuted_graph_full_basis_diagonal_pm_one() {
        let g = karate();
        let (p, corr) = permute_graph(&g, 3);
        let b1 = basis(&g, 34);
        let b2 = basis(&p, 34);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        // restrict to simple eigenvalues: the karate spectrum has repeats
        for block in b1.multiplicity_blocks().iter().filter(|b| b.len() == 1) {
            let i = block.start;
            assert!(
                (c.coefficients()[[i, i]].abs() - 1.0).abs() < 1e-6,
                "diag {i} = {}",
                c.coefficients()[[i, i]]
            );
            for j in 0..34 {
                if j != i && b1.multiplicity_blocks().iter().any(|b| b.len() == 1 && b.start == j)
                {
                    assert!(c.coefficients()[[i, j]].abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn map_matches_dense_triple_product_oracle() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 0, 17).unwrap();
        let b1 = basis(&g, 10);
        let b2 = basis(&sub, 10);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        // oracle: materialize S (n1 x n2) and compute Phi_2^T S^T Phi_1
        let s = corr.matrix();
        let oracle = b2.phi().t().dot(&s.t().dot(b1.phi()));
        let diff = (c.coefficients() - &oracle).mapv(f64::abs);
        assert!(diff.fold(0.0f64, |m, &v| m.max(v)) < 1e-12);
    }

    #[test]
    fn full_basis_reconstructs_selection_matrix() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 2, 20).unwrap();
        let b1 = basis(&g, 34);
        let b2 = basis(&sub, 20);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let recon = b2.phi().dot(&c.coefficients().dot(&b1.phi().t()));
        let s_t = corr.matrix().t().to_owned();
        let err = (&recon - &s_t).mapv(|v| v * v).sum().sqrt();
        assert!(err < 1e-8, "reconstruction error {err}");
    }

    #[test]
    fn transfer_identity_full_basis() {
        let g = karate();
        let b = basis(&g, 34);
        let c = compute_spectral_map(&NodeCorrespondence::identity(34), &b, &b).unwrap();
        let f = crate::spectral::rw_positional_encoding(&g, 4).unwrap();
        let g_hat = transfer_signal(&c, &b, &b, &f).unwrap();
        let err = (f.values() - g_hat.values()).mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
        assert!(err < 1e-8);
    }

    #[test]
    fn transfer_of_eigenfunction_picks_map_column() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 0, 17).unwrap();
        let b1 = basis(&g, 8);
        let b2 = basis(&sub, 8);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let f = SignalMatrix::from_column(b1.phi().column(0).to_vec()).unwrap();
        let g_hat = transfer_signal(&c, &b1, &b2, &f).unwrap();
        let expect = b2.phi().dot(&c.coefficients().column(0));
        for y in 0..17 {
            assert!((g_hat.values()[[y, 0]] - expect[y]).abs() < 1e-12);
        }
    }

    #[test]
    fn full_basis_transfer_equals_node_transfer() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 5, 21).unwrap();
        let b1 = basis(&g, 34);
        let b2 = basis(&sub, 21);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let f = crate::spectral::rw_positional_encoding(&g, 5).unwrap();
        let via_map = transfer_signal(&c, &b1, &b2, &f).unwrap();
        let via_nodes = corr.apply(&f).unwrap();
        let err = (via_map.values() - via_nodes.values())
            .mapv(f64::abs)
            .fold(0.0f64, |m, &v| m.max(v));
        assert!(err < 1e-8, "max deviation {err}");
    }

    #[test]
    fn transfer_is_linear() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 1, 15).unwrap();
        let b1 = basis(&g, 9);
        let b2 = basis(&sub, 7);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let f1 = crate::spectral::rw_positional_encoding(&g, 2).unwrap();
        let f2 = SignalMatrix::new(f1.values().mapv(|v| v * v + 0.3)).unwrap();
        let combo = SignalMatrix::new(2.0 * f1.values() - 0.7 * f2.values()).unwrap();
        let t = |f: &SignalMatrix| transfer_signal(&c, &b1, &b2, f).unwrap();
        let lhs = t(&combo);
        let rhs = 2.0 * t(&f1).values() - 0.7 * t(&f2).values();
        let err = (lhs.values() - &rhs).mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
        assert!(err < 1e-10);
    }

    #[test]
    fn truncation_is_band_limiting() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 0, 17).unwrap();
        let k1 = 12;
        let b1 = basis(&g, k1);
        let b2 = basis(&sub, 10);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let f = crate::spectral::rw_positional_encoding(&g, 3).unwrap();
        // low-pass filter f through the K1-band projector
        let proj = b1.phi().dot(&b1.phi().t());
        let f_lp = SignalMatrix::new(proj.dot(f.values())).unwrap();
        let a = transfer_signal(&c, &b1, &b2, &f).unwrap();
        let b = transfer_signal(&c, &b1, &b2, &f_lp).unwrap();
        let err = (a.values() - b.values()).mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
        assert!(err < 1e-8);
    }

    #[test]
    fn normalize_closed_form() {
        let f = SignalMatrix::from_column(vec![1.0, 2.0, 3.0]).unwrap();
        let z = normalize_signal(&f).unwrap();
        let root = (3.0f64 / 2.0).sqrt();
        assert!((z.values()[[0, 0]] + root).abs() < 1e-12);
        assert!(z.values()[[1, 0]].abs() < 1e-12);
        assert!((z.values()[[2, 0]] - root).abs() < 1e-12);
        // idempotent
        let zz = normalize_signal(&z).unwrap();
        let err = (z.values() - zz.values()).mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
        assert!(err < 1e-10);
        // constant column becomes zero
        let c = SignalMatrix::from_column(vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(normalize_signal(&c).unwrap().values().sum(), 0.0);
    }

    #[test]
    fn rmse_hand_values() {
        let z = SignalMatrix::from_column(vec![0.0, 0.0]).unwrap();
        let ones = SignalMatrix::from_column(vec![1.0, 1.0]).unwrap();
        let pyth = SignalMatrix::from_column(vec![3.0, 4.0]).unwrap();
        assert_eq!(rmse(&z, &z).unwrap(), 0.0);
        assert!((rmse(&z, &ones).unwrap() - 1.0).abs() < 1e-15);
        assert!((rmse(&z, &pyth).unwrap() - (25.0f64 / 2.0).sqrt()).abs() < 1e-12);
        assert!(rmse(&z, &SignalMatrix::from_column(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn map_distance_sign_invariance() {
        let c = array![[1.0, 2.0], [3.0, -1.0]];
        let meta = BasisMeta {
            n: 4,
            k: 2,
            kind: LaplacianKind::Normalized,
        };
        let m1 = SpectralMap::from_parts(c.clone(), meta, meta, MapSource::GroundTruth).unwrap();
        let m2 = SpectralMap::from_parts(-c, meta, meta, MapSource::GroundTruth).unwrap();
        assert_eq!(map_distance(&m1, &m1).unwrap(), 0.0);
        assert_eq!(map_distance(&m1, &m2).unwrap(), 0.0);
    }

    #[test]
    fn map_distance_matches_exhaustive_sign_search() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = 5;
        let mut c = Array2::zeros((k, k));
        for v in c.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let mut c2 = c.clone();
        for j in 0..k {
            c2[[2, j]] = -c2[[2, j]]; // one flipped row
        }
        c2[[0, 0]] += 0.1; // one shifted entry
        let got = map_distance_raw(&c, &c2).unwrap();

        // oracle: exhaustive search over all 2^k sign patterns
        let mut best = f64::INFINITY;
        for mask in 0..(1u32 << k) {
            let mut total = 0.0;
            for i in 0..k {
                let s = if mask & (1 << i) != 0 { -1.0 } else { 1.0 };
                for j in 0..k {
                    let d = c[[i, j]] - s * c2[[i, j]];
                    total += d * d;
                }
            }
            best = best.min(total);
        }
        assert!((got - best).abs() < 1e-12);
        assert!((got - 0.01).abs() < 1e-12);
    }

    #[test]
    fn noise_map_determinism_and_zero_sigma() {
        let g = karate();
        let b = basis(&g, 6);
        let c = compute_spectral_map(&NodeCorrespondence::identity(34), &b, &b).unwrap();
        let same = gaussian_noise_map(&c, 0.0, 1).unwrap();
        assert_eq!(c.coefficients(), same.coefficients());
        let n1 = gaussian_noise_map(&c, 0.2, 7).unwrap();
        let n2 = gaussian_noise_map(&c, 0.2, 7).unwrap();
        assert_eq!(n1.coefficients(), n2.coefficients());
        let n3 = gaussian_noise_map(&c, 0.2, 8).unwrap();
        assert_ne!(n1.coefficients(), n3.coefficients());
    }

    #[test]
    fn noise_distance_concentrates_at_sigma_sq_k_sq() {
        use rand::Rng;
        let k = 50;
        let sigma = 0.2;
        let meta = BasisMeta {
            n: 100,
            k,
            kind: LaplacianKind::Normalized,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut c = Array2::zeros((k, k));
        for v in c.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let base = SpectralMap::from_parts(c, meta, meta, MapSource::GroundTruth).unwrap();
        let mut mean = 0.0;
        let seeds = 20;
        for s in 0..seeds {
            let noisy = gaussian_noise_map(&base, sigma, s).unwrap();
            mean += map_distance(&base, &noisy).unwrap();
        }
        mean /= seeds as f64;
        let expect = sigma * sigma * (k * k) as f64; // 100
        assert!(
            (mean - expect).abs() < 0.1 * expect,
            "mean {mean}, expected about {expect}"
        );
    }

    #[test]
    fn distillation_loss_zero_and_oracle() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 0, 17).unwrap();
        let b1 = basis(&g, 8);
        let b2 = basis(&sub, 8);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let x_t = crate::spectral::rw_positional_encoding(&g, 3).unwrap();
        // x_s built so that the loss vanishes by orthonormality
        let x_s = transfer_signal(&c, &b1, &b2, &x_t).unwrap();
        let loss = distillation_loss(&c, &b1, &b2, &x_t, &x_s).unwrap();
        assert!(loss < 1e-8, "loss {loss}");

        let zero_t = SignalMatrix::new(Array2::zeros((34, 2))).unwrap();
        let zero_s = SignalMatrix::new(Array2::zeros((17, 2))).unwrap();
        assert_eq!(distillation_loss(&c, &b1, &b2, &zero_t, &zero_s).unwrap(), 0.0);

        // dense oracle on a random pair
        let x_s2 = crate::spectral::rw_positional_encoding(&sub, 3).unwrap();
        let got = distillation_loss(&c, &b1, &b2, &x_t, &x_s2).unwrap();
        let lhs = c.coefficients().dot(&b1.phi().t().dot(x_t.values()));
        let rhs = b2.phi().t().dot(x_s2.values());
        let oracle = (&lhs - &rhs).mapv(|v| v * v).sum().sqrt();
        assert!((got - oracle).abs() < 1e-10);
    }

    #[test]
    fn block_aligned_distance_absorbs_rotations() {
        use rand::Rng;
        let meta = BasisMeta {
            n: 8,
            k: 4,
            kind: LaplacianKind::Normalized,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut c = Array2::zeros((4, 4));
        for v in c.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        // rotate rows 1..3 by an orthogonal 2x2 inside their block
        let theta: f64 = 0.83;
        let (s, co) = theta.sin_cos();
        let mut rotated = c.clone();
        for j in 0..4 {
            rotated[[1, j]] = co * c[[1, j]] - s * c[[2, j]];
            rotated[[2, j]] = s * c[[1, j]] + co * c[[2, j]];
        }
        let a = SpectralMap::from_parts(c, meta, meta, MapSource::GroundTruth).unwrap();
        let b = SpectralMap::from_parts(rotated, meta, meta, MapSource::GroundTruth).unwrap();
        // per-row signs cannot undo a rotation
        assert!(map_distance(&a, &b).unwrap() > 1e-3);
        // the block-aligned variant can
        let aligned = map_distance_block_aligned(&a, &b, &[0..1, 1..3]).unwrap();
        assert!(aligned < 1e-12, "aligned distance {aligned}");
        // no blocks means the per-row behavior
        assert_eq!(
            map_distance_block_aligned(&a, &b, &[]).unwrap(),
            map_distance(&a, &b).unwrap()
        );
        // overlapping blocks are rejected
        assert!(map_distance_block_aligned(&a, &b, &[0..2, 1..3]).is_err());
    }

    #[test]
    fn mean_squared_loss_variant() {
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 0, 17).unwrap();
        let b1 = basis(&g, 8);
        let b2 = basis(&sub, 8);
        let c = compute_spectral_map(&corr, &b1, &b2).unwrap();
        let x_t = crate::spectral::rw_positional_encoding(&g, 3).unwrap();
        let x_s = crate::spectral::rw_positional_encoding(&sub, 3).unwrap();
        let frob = distillation_loss(&c, &b1, &b2, &x_t, &x_s).unwrap();
        let mean = distillation_loss_with(&c, &b1, &b2, &x_t, &x_s, LossNorm::MeanSquared)
            .unwrap();
        let entries = (8 * 3) as f64;
        assert!((mean - frob * frob / entries).abs() < 1e-12);
    }

    #[test]
    fn default_square_k_rule() {
        assert_eq!(default_square_k(1000, 600), 30); // 5% of 600
        assert_eq!(default_square_k(34, 17), 10); // floor of 10
        assert_eq!(default_square_k(8, 8), 8); // capped at n
    }

    #[test]
    fn reverse_direction_transfer_scatters_signal() {
        // swap the graph roles: functions now live on the subgraph and are
        // lifted to the full graph through C_rev = Phi_full^T S^T Phi_sub
        let g = karate();
        let (sub, corr) = khop_subgraph(&g, 0, 17).unwrap();
        let b_sub = basis(&sub, 17);
        let b_full = basis(&g, 34);
        let s = corr.matrix(); // 34 x 17
        let c_rev = b_full.phi().t().dot(&s.dot(b_sub.phi()));
        let f = crate::spectral::rw_positional_encoding(&sub, 3).unwrap();
        let lifted = b_full
            .phi()
            .dot(&c_rev.dot(&b_sub.phi().t().dot(f.values())));
        // at full rank the lift places the signal on matched nodes and zero
        // elsewhere
        let mut matched = [false; 34];
        for y in 0..17 {
            let x = corr.target_of(y);
            matched[x] = true;
            for col in 0..3 {
                assert!((lifted[[x, col]] - f.values()[[y, col]]).abs() < 1e-8);
            }
        }
        for x in (0..34).filter(|&x| !matched[x]) {
            for col in 0..3 {
                assert!(lifted[[x, col]].abs() < 1e-8);
            }
        }
    }
}
