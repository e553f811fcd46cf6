//! Small dense helpers on top of `nalgebra`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Matrix;

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
///
/// Column `k` of the returned matrix is the unit eigenvector for the `k`-th
/// eigenvalue. Equal eigenvalues keep the solver's index order.
pub fn sym_eigen_desc(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);
    (values, vectors)
}

/// Eigenvalues only, descending.
pub fn sym_eigenvalues_desc(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|p, q| q.total_cmp(p));
    v
}

/// `J A J` with `J = I - 11ᵀ/n`: removes row means, column means and adds
/// back the grand mean.
pub fn center(a: &Matrix) -> Matrix {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let inv = 1.0 / n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| a.row(i).sum() * inv).collect();
    let col_means: Vec<f64> = (0..n).map(|j| a.column(j).sum() * inv).collect();
    let grand = row_means.iter().sum::<f64>() * inv;
    Matrix::from_fn(n, n, |i, j| a[(i, j)] - row_means[i] - col_means[j] + grand)
}

/// Largest `|A_ij - A_ji|` and where it occurs.
pub fn max_asymmetry(a: &Matrix) -> (f64, usize, usize) {
    let n = a.nrows();
    let mut worst = (0.0, 0, 0);
    for j in 0..n {
        for i in 0..j {
            let gap = (a[(i, j)] - a[(j, i)]).abs();
            if gap > worst.0 || gap.is_nan() {
                worst = (gap, i, j);
            }
        }
    }
    worst
}

/// Fails if `a` is not square or deviates from symmetry by more than `tol`.
pub fn check_symmetric(a: &Matrix, tol: f64) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let (gap, i, j) = max_asymmetry(a);
    if gap > tol || gap.is_nan() {
        return Err(Error::Asymmetric { i, j, gap });
    }
    Ok(())
}

/// `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &Matrix) -> Matrix {
    let n = a.nrows();
    Matrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

pub fn frobenius(a: &Matrix) -> f64 {
    libm::sqrt(a.iter().map(|v| v * v).sum::<f64>())
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Largest singular value.
pub fn operator_norm(a: &Matrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |m, &s| m.max(s))
}

pub fn ensure_square(a: &Matrix, n: usize) -> Result<()> {
    if a.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.nrows(),
        });
    }
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    Ok(())
}
