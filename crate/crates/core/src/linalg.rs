//! Small dense linear-algebra helpers shared by the pursuit solvers.

use nalgebra::{DMatrix, DVector};

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve the symmetric positive (semi-)definite system `A x = b` by Cholesky,
/// falling back to an SVD-based least-norm solve when the factorization
/// fails. Support sizes are tiny (at most the sparsity budget), so cost is
/// negligible either way.
pub(crate) fn spd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if let Some(chol) = a.clone().cholesky() {
        return chol.solve(b);
    }
    // Rank-deficient Gram matrix (duplicated atoms, or zeroed columns at
    // lambda = 0): take the minimum-norm solution.
    let svd = a.clone().svd(true, true);
    svd.solve(b, 1e-12).expect("svd solve on square system")
}
