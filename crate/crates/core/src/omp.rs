//! Baseline sparse self-expression via plain orthogonal matching pursuit
//! (the SSCOMP method).
//!
//! This is kept independent of the damped pursuit in [`crate::consensus`] on
//! purpose: the two are checked against each other in the lambda = 0 limit.

use crate::dataset::DataMatrix;
use crate::linalg::{axpy, norm2, spd_solve};
use crate::sparse::{SelfExpressionMatrix, SparseCoefVector};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no candidate atoms")]
    EmptyCandidates,
    #[error("invalid sparsity budget {s} for {n} points")]
    InvalidSparsity { s: usize, n: usize },
    #[error("dropout rate {0} diverges the regularizer (must be < 1)")]
    DivergentRegularizer(f64),
    #[error("column {index}: {source}")]
    Column { index: usize, source: Box<SolveError> },
}

pub(crate) fn check_sparsity(s: usize, n: usize) -> Result<(), SolveError> {
    if s == 0 || s >= n {
        return Err(SolveError::InvalidSparsity { s, n });
    }
    Ok(())
}

/// Least-squares coefficients of `target` on the support columns, plus the
/// residual. Normal equations with Cholesky; singular Gram matrices fall
/// back to the least-norm solution.
fn solve_support(x: &DataMatrix, support: &[usize], target: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let k = support.len();
    let gram = DMatrix::from_fn(k, k, |a, b| x.col_dot(support[a], x.col(support[b])));
    let rhs = DVector::from_fn(k, |a, _| x.col_dot(support[a], target));
    let coef = spd_solve(&gram, &rhs);

    let mut residual = target.to_vec();
    for (pos, &i) in support.iter().enumerate() {
        axpy(&mut residual, -coef[pos], x.col(i));
    }
    (coef.iter().copied().collect(), residual)
}

/// Sparse coefficients for point `j` by orthogonal matching pursuit: greedily
/// add the atom most correlated with the residual (ties break to the lowest
/// index), re-solve least squares on the support, stop at `s` atoms or when
/// the residual norm drops to `eps`.
pub fn omp_solve(
    x: &DataMatrix,
    j: usize,
    s: usize,
    eps: f64,
) -> Result<SparseCoefVector, SolveError> {
    let n = x.num_points();
    check_sparsity(s, n)?;
    if n < 2 {
        return Err(SolveError::EmptyCandidates);
    }

    let target = x.col(j).to_vec();
    let mut residual = target.clone();
    let mut support: Vec<usize> = Vec::with_capacity(s);
    let mut in_support = vec![false; n];
    let mut coef: Vec<f64> = Vec::new();

    while support.len() < s && norm2(&residual) > eps {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if i == j || in_support[i] {
                continue;
            }
            let score = x.col_dot(i, &residual).abs();
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        let Some((pick, _)) = best else { break };
        support.push(pick);
        in_support[pick] = true;
        let (c, r) = solve_support(x, &support, &target);
        coef = c;
        residual = r;
    }

    Ok(SparseCoefVector::from_entries(
        n,
        support.iter().copied().zip(coef.iter().copied()).collect(),
    ))
}

/// Column-by-column OMP self-expression matrix. Columns are independent and
/// solved in parallel; assembly order is fixed so the result matches the
/// sequential one.
pub fn sscomp_matrix(
    x: &DataMatrix,
    s: usize,
    eps: f64,
) -> Result<SelfExpressionMatrix, SolveError> {
    let n = x.num_points();
    let columns: Result<Vec<_>, SolveError> = (0..n)
        .into_par_iter()
        .map(|j| {
            omp_solve(x, j, s, eps)
                .map_err(|e| SolveError::Column { index: j, source: Box::new(e) })
        })
        .collect();
    Ok(SelfExpressionMatrix::from_columns(columns?))
}
