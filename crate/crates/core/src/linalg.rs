//! Dense row-major matrix and the ridge least-squares solve used for the
//! RBF output layer.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    /// `x^T A` for a vector of length `rows`.
    pub fn left_mul(&self, x: &[F]) -> Vec<F> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![F::zero(); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o = *o + xr * a;
            }
        }
        out
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (r, c): (usize, usize)) -> &F {
        &self.data[r * self.cols + c]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut F {
        &mut self.data[r * self.cols + c]
    }
}

/// Minimizes `‖A W − B‖² + ridge·‖W‖²` over `W` (Frobenius norms).
///
/// Solved by Householder QR of `A` stacked on `√ridge · I`, which avoids
/// squaring the condition number the way the normal equations would.
pub fn ridge_least_squares<F: Scalar>(a: &Matrix<F>, b: &Matrix<F>, ridge: F) -> Result<Matrix<F>> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            actual: b.rows,
        });
    }
    if ridge < F::zero() || !ridge.is_finite() {
        return Err(Error::param("ridge must be finite and non-negative"));
    }
    let p = a.cols;
    let m = a.rows + p;
    let q = b.cols;

    // column-major working copies for cache-friendly reflections
    let mut r: Vec<Vec<F>> = (0..p)
        .map(|c| {
            let mut col: Vec<F> = (0..a.rows).map(|i| a[(i, c)]).collect();
            col.extend((0..p).map(|k| if k == c { ridge.sqrt() } else { F::zero() }));
            col
        })
        .collect();
    let mut rhs: Vec<Vec<F>> = (0..q)
        .map(|c| {
            let mut col: Vec<F> = (0..b.rows).map(|i| b[(i, c)]).collect();
            col.resize(m, F::zero());
            col
        })
        .collect();

    let two = F::lit(2.0);
    for k in 0..p {
        let norm = r[k][k..].iter().map(|&v| v * v).sum::<F>().sqrt();
        if norm == F::zero() {
            continue;
        }
        let alpha = if r[k][k] > F::zero() { -norm } else { norm };
        let mut v: Vec<F> = r[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vv: F = v.iter().map(|&x| x * x).sum();
        if vv == F::zero() {
            continue;
        }
        let reflect = |col: &mut [F]| {
            let s: F = v.iter().zip(col.iter()).map(|(&vi, &ci)| vi * ci).sum();
            let f = two * s / vv;
            for (ci, &vi) in col.iter_mut().zip(&v) {
                *ci = *ci - f * vi;
            }
        };
        for col in r.iter_mut().skip(k) {
            reflect(&mut col[k..]);
        }
        for col in rhs.iter_mut() {
            reflect(&mut col[k..]);
        }
    }

    let max_diag = (0..p).map(|k| r[k][k].abs()).fold(F::zero(), F::max);
    let tol = max_diag * F::epsilon() * F::from_count(m.max(p));
    if (0..p).any(|k| r[k][k].abs() <= tol) {
        return Err(Error::Singular);
    }

    let mut w = Matrix::zeros(p, q);
    for c in 0..q {
        for i in (0..p).rev() {
            let mut s = rhs[c][i];
            for j in i + 1..p {
                s = s - r[j][i] * w[(j, c)];
            }
            w[(i, c)] = s / r[i][i];
        }
    }
    Ok(w)
}
