//! Shift-invert Lanczos for the smallest eigenpairs of a sparse symmetric
//! positive semi-definite matrix.
//!
//! The operator is `(L - sigma I)^{-1}` with `sigma = -1e-3`, applied through
//! an inner conjugate-gradient solve (the shifted matrix is positive
//! definite for any PSD `L`). The Krylov basis is kept fully
//! reorthogonalized; the subspace is grown and the factorization restarted
//! until every requested Ritz pair meets the residual tolerance on the
//! original matrix.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::SparseSymMatrix;
use crate::spectral::dense::symmetric_eigen;

const SHIFT: f64 = -1e-3;
const LANCZOS_RNG_SEED: u64 = 0x7370_6563_6d61_7000; // fixed; solver is deterministic

/// `k` smallest eigenpairs of `l`. Returns `(values ascending, vectors n x k)`.
pub fn smallest_eigenpairs(
    l: &SparseSymMatrix,
    k: usize,
    residual_tol: f64,
) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = l.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "requested k={k} eigenpairs of an {n}x{n} matrix"
        )));
    }
    let mut dim = (2 * k + 16).min(n).max(k.min(n));
    loop {
        match factorize(l, k, dim, residual_tol)? {
            Some(result) => return Ok(result),
            None => {
                if dim == n {
                    return Err(Error::ConvergenceFailure(format!(
                        "Lanczos residuals above {residual_tol:e} at full Krylov dimension {n}"
                    )));
                }
                dim = (2 * dim).min(n);
            }
        }
    }
}

/// One full-reorthogonalized Lanczos factorization at Krylov dimension `dim`.
/// Returns `None` when some requested Ritz pair misses the tolerance.
fn factorize(
    l: &SparseSymMatrix,
    k: usize,
    dim: usize,
    residual_tol: f64,
) -> Result<Option<(Vec<f64>, Array2<f64>)>> {
    let n = l.n();
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_RNG_SEED);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut alpha = Vec::with_capacity(dim);
    let mut beta: Vec<f64> = Vec::with_capacity(dim);

    let mut v = random_unit(&mut rng, n);
    for _ in 0..dim {
        basis.push(v.clone());
        let j = basis.len() - 1;
        let mut w = shifted_inverse_apply(l, &v)?;
        if j > 0 {
            let b = beta[j - 1];
            for (wi, pi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= b * pi;
            }
        }
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= a * vi;
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = norm(&w);
        if b < 1e-12 {
            // invariant subspace: continue with a fresh orthogonal direction
            w = random_unit(&mut rng, n);
            for q in &basis {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
            let nb = norm(&w);
            if nb < 1e-12 {
                beta.push(0.0);
                break;
            }
            beta.push(0.0);
            for wi in w.iter_mut() {
                *wi /= nb;
            }
        } else {
            beta.push(b);
            for wi in w.iter_mut() {
                *wi /= b;
            }
        }
        v = w;
    }

    let q = basis.len();
    if q < k {
        return Ok(None);
    }
    // Ritz pairs of the tridiagonal operator
    let mut t = Array2::zeros((q, q));
    for j in 0..q {
        t[[j, j]] = alpha[j];
        if j + 1 < q {
            t[[j, j + 1]] = beta[j];
            t[[j + 1, j]] = beta[j];
        }
    }
    let (theta, z) = symmetric_eigen(&t)?;

    // largest theta of the inverse operator correspond to smallest
    // eigenvalues of l
    let picked: Vec<usize> = (0..q).rev().take(k).collect();
    let mut values = Vec::with_capacity(k);
    let mut vectors = Array2::zeros((n, k));
    for (out, &idx) in picked.iter().enumerate() {
        let _ = theta[idx];
        let mut x = vec![0.0; n];
        for (j, b) in basis.iter().enumerate() {
            let zj = z[[j, idx]];
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += zj * bi;
            }
        }
        let nx = norm(&x);
        for xi in x.iter_mut() {
            *xi /= nx;
        }
        // Rayleigh quotient on the original matrix
        let lx = l.matvec_owned(&x);
        let lambda = dot(&x, &lx);
        let mut res = 0.0;
        for i in 0..n {
            let r = lx[i] - lambda * x[i];
            res += r * r;
        }
        let res = res.sqrt();
        if res > residual_tol * lambda.abs().max(1.0) {
            return Ok(None);
        }
        values.push(lambda);
        for (i, &xi) in x.iter().enumerate() {
            vectors[[i, out]] = xi;
        }
    }

    // ascending by eigenvalue
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = Array2::zeros((n, k));
    for (out, &i) in order.iter().enumerate() {
        sorted_vectors.column_mut(out).assign(&vectors.column(i));
    }
    Ok(Some((sorted_values, sorted_vectors)))
}

/// Solves `(l - SHIFT * I) y = x` by conjugate gradients.
fn shifted_inverse_apply(l: &SparseSymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    let n = l.n();
    let apply = |v: &[f64], out: &mut Vec<f64>| {
        l.matvec(v, out);
        for (oi, vi) in out.iter_mut().zip(v) {
            *oi -= SHIFT * vi;
        }
    };
    let mut y = vec![0.0; n];
    let mut r = x.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let bnorm = norm(x).max(f64::MIN_POSITIVE);
    let tol = 1e-13 * bnorm;
    let mut rr = dot(&r, &r);
    let max_iter = 40 * n + 100;
    for _ in 0..max_iter {
        if rr.sqrt() <= tol {
            return Ok(y);
        }
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::ConvergenceFailure(
                "CG encountered a non-positive curvature direction".into(),
            ));
        }
        let step = rr / pap;
        for i in 0..n {
            y[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_next = dot(&r, &r);
        let ratio = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + ratio * p[i];
        }
    }
    if rr.sqrt() <= 1e-9 * bnorm {
        return Ok(y);
    }
    Err(Error::ConvergenceFailure(format!(
        "inner CG stalled with relative residual {:e}",
        rr.sqrt() / bnorm
    )))
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm(&v).max(f64::MIN_POSITIVE);
    for vi in v.iter_mut() {
        *vi /= nv;
    }
    v
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
