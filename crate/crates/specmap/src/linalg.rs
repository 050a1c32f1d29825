//! Small dense helpers shared by the estimation code.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Cholesky factor of a symmetric positive-definite matrix. Fails with
/// [`Error::RankDeficient`] when a pivot falls below `1e-12` times the
/// largest diagonal entry.
pub(crate) struct Cholesky {
    l: Array2<f64>,
}

impl Cholesky {
    pub fn factor(a: &Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch("cholesky needs a square matrix".into()));
        }
        let scale = (0..n).map(|i| a[[i, i]].abs()).fold(0.0f64, f64::max).max(1e-300);
        let tol = 1e-12 * scale;
        let mut l = Array2::zeros((n, n));
        for j in 0..n {
            let mut d = a[[j, j]];
            for k in 0..j {
                d -= l[[j, k]] * l[[j, k]];
            }
            if d <= tol {
                return Err(Error::RankDeficient);
            }
            let dj = d.sqrt();
            l[[j, j]] = dj;
            for i in (j + 1)..n {
                let mut v = a[[i, j]];
                for k in 0..j {
                    v -= l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = v / dj;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.l.nrows();
        let mut y = b.clone();
        for i in 0..n {
            for k in 0..i {
                let v = y[k];
                y[i] -= self.l[[i, k]] * v;
            }
            y[i] /= self.l[[i, i]];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let v = y[k];
                y[i] -= self.l[[k, i]] * v;
            }
            y[i] /= self.l[[i, i]];
        }
        y
    }
}

pub(crate) fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|&v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn solves_spd_system() {
        let a = array![[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]];
        let b = array![1.0, 2.0, 3.0];
        let x = Cholesky::factor(&a).unwrap().solve(&b);
        let back = a.dot(&x);
        for i in 0..3 {
            assert!((back[i] - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = array![[1.0, 1.0], [1.0, 1.0]];
        assert!(matches!(Cholesky::factor(&a), Err(Error::RankDeficient)));
    }
}
