//! Dense symmetric eigendecomposition: Householder tridiagonalization
//! followed by the implicit-shift QL iteration, with accumulated
//! transformations. This is the EISPACK tred2/tql2 pair; it returns the full
//! spectrum with eigenvalues ascending and orthonormal eigenvector columns.
//!
//! The transformation matrix is kept in a flat column-major buffer so the
//! rotation and reflection inner loops run over contiguous slices.

// the kernels keep the classical indexed formulation
#![allow(clippy::needless_range_loop)]

use ndarray::Array2;

use crate::error::{Error, Result};

/// Column-major n x n working storage.
struct ColMat {
    n: usize,
    data: Vec<f64>,
}

impl ColMat {
    fn from_symmetric(a: &Array2<f64>) -> Self {
        let n = a.nrows();
        let mut data = vec![0.0; n * n];
        for j in 0..n {
            let col = &mut data[j * n..(j + 1) * n];
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = a[[i, j]];
            }
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[j * self.n + i]
    }

    #[inline]
    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    #[inline]
    fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.n..(j + 1) * self.n]
    }

    /// Mutable views of two distinct columns.
    #[inline]
    fn two_cols_mut(&mut self, a: usize, b: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(a < b);
        let n = self.n;
        let (lo, hi) = self.data.split_at_mut(b * n);
        (&mut lo[a * n..(a + 1) * n], &mut hi[..n])
    }

    fn into_array(self) -> Array2<f64> {
        let n = self.n;
        Array2::from_shape_vec((n, n).f(), self.data).expect("shape matches")
    }
}

use ndarray::ShapeBuilder;

/// Full eigendecomposition of a symmetric matrix. Returns `(values, vectors)`
/// with values ascending and the i-th column of `vectors` paired with
/// `values[i]`.
pub fn symmetric_eigen(a: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    let mut v = ColMat::from_symmetric(a);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;
    Ok((d, v.into_array()))
}

/// Householder reduction to symmetric tridiagonal form, accumulating the
/// orthogonal transformation in `v`. On exit `d` holds the diagonal and
/// `e[1..]` the subdiagonal.
fn tred2(v: &mut ColMat, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v.at(n - 1, j);
    }

    for i in (1..n).rev() {
        // scale to avoid under/overflow
        let mut scale = 0.0;
        let mut h = 0.0;
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v.at(i - 1, j);
                *v.at_mut(i, j) = 0.0;
                *v.at_mut(j, i) = 0.0;
            }
        } else {
            // Householder vector
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = 0.0;
            }

            // apply similarity transformation to remaining columns
            for j in 0..i {
                let f = d[j];
                *v.at_mut(j, i) = f;
                let col_j = v.col(j);
                let mut g = e[j] + col_j[j] * f;
                for k in (j + 1)..i {
                    g += col_j[k] * d[k];
                    e[k] += col_j[k] * f;
                }
                e[j] = g;
            }
            let mut f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col_j = v.col_mut(j);
                for k in j..i {
                    col_j[k] -= f * e[k] + g * d[k];
                }
                d[j] = col_j[i - 1];
                col_j[i] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..(n - 1) {
        let vii = v.at(i, i);
        *v.at_mut(n - 1, i) = vii;
        *v.at_mut(i, i) = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v.at(k, i + 1) / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                {
                    let next = v.col(i + 1);
                    let col_j = v.col(j);
                    for k in 0..=i {
                        g += next[k] * col_j[k];
                    }
                }
                let col_j = v.col_mut(j);
                for k in 0..=i {
                    col_j[k] -= g * d[k];
                }
            }
        }
        let next = v.col_mut(i + 1);
        for item in next.iter_mut().take(i + 1) {
            *item = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v.at(n - 1, j);
        *v.at_mut(n - 1, j) = 0.0;
    }
    *v.at_mut(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix, updating
/// the accumulated transformation `v`. Sorts eigenpairs ascending on exit.
fn tql2(v: &mut ColMat, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m >= n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 100 {
                    return Err(Error::ConvergenceFailure(format!(
                        "QL iteration exceeded 100 sweeps at index {l}"
                    )));
                }

                // implicit Wilkinson-like shift
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                // implicit QL sweep
                p = d[m];
                let mut c = 1.0f64;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0f64;
                let mut s2 = 0.0f64;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    let r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    // plane rotation over two adjacent eigenvector columns
                    let (col_i, col_ip1) = v.two_cols_mut(i, i + 1);
                    for (a, b) in col_i.iter_mut().zip(col_ip1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort ascending, swapping eigenvector columns along
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in (i + 1)..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            let (col_i, col_k) = v.two_cols_mut(i, k);
            col_i.swap_with_slice(col_k);
        }
    }
    Ok(())
}
