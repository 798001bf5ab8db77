//! Small dense helpers on top of nalgebra shared by the estimation modules.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative eigenvalue tolerance used for PSD checks.
pub const PSD_TOL: f64 = 1e-10;

/// Returns `(A + Aᵀ) / 2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Ratio of extreme eigenvalue magnitudes of a symmetric matrix.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    let eig = SymmetricEigen::new(symmetrize(a));
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for &v in eig.eigenvalues.iter() {
        lo = lo.min(v.abs());
        hi = hi.max(v.abs());
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

pub fn is_symmetric(a: &DMatrix<f64>, rel_tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let n = a.nrows();
    (0..n).all(|i| (0..i).all(|j| (a[(i, j)] - a[(j, i)]).abs() <= rel_tol * scale))
}

/// Smallest eigenvalue must be at least `-PSD_TOL * largest`.
pub fn is_psd(a: &DMatrix<f64>) -> bool {
    if !is_symmetric(a, 1e-9) {
        return false;
    }
    if a.nrows() == 0 {
        return true;
    }
    let eig = SymmetricEigen::new(symmetrize(a));
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    min >= -PSD_TOL * max.abs().max(0.0)
}

/// Cholesky factor of a symmetric positive definite matrix; reports the
/// condition number when factorization fails.
pub fn spd_factor(a: &DMatrix<f64>, what: &'static str) -> Result<Cholesky<f64, Dyn>> {
    if !a.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical(format!("{what} has non-finite entries")));
    }
    Cholesky::new(symmetrize(a)).ok_or_else(|| Error::Singular {
        what,
        condition: condition_number(a),
    })
}

/// Symmetric square root `S` with `S Sᵀ = A` for a PSD matrix, clamping
/// round-off negative eigenvalues to zero.
pub fn psd_sqrt(a: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(a));
    let roots = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let scaled = &eig.eigenvectors * DMatrix::from_diagonal(&roots);
    scaled * eig.eigenvectors.transpose()
}

pub fn trace(a: &DMatrix<f64>) -> f64 {
    a.diagonal().sum()
}

pub fn diag(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(v))
}
