//! Damped orthogonal matching pursuit: greedy pursuit of
//! `||x_j - Xi b||^2 + lambda ||b - c||^2` subject to a sparsity budget,
//! where `Xi` is the dictionary with dropped columns zeroed.

use crate::dataset::DataMatrix;
use crate::linalg::{axpy, dot, norm2, spd_solve};
use crate::omp::SolveError;
use crate::sparse::SparseCoefVector;
use nalgebra::{DMatrix, DVector};

/// Selection score of atom `i` against residual `q` given consensus value
/// `c_ij`: `(x_i^T q)^2 + 2 lambda (x_i^T q) c_ij - lambda c_ij^2`.
///
/// The atom maximizing this score is exactly the atom whose optimal one-atom
/// update minimizes the penalized objective; the score differs from that
/// objective by the additive constant `||q||^2` and a positive factor.
pub fn psi_score(x_i: &[f64], q: &[f64], c_ij: f64, lambda: f64) -> f64 {
    psi_from_dot(dot(x_i, q), c_ij, lambda)
}

#[inline]
fn psi_from_dot(t: f64, c_ij: f64, lambda: f64) -> f64 {
    t * t + 2.0 * lambda * t * c_ij - lambda * c_ij * c_ij
}

/// Penalized least squares restricted to `support`:
/// `b_S = (Xi_S^T Xi_S + lambda I)^-1 (Xi_S^T x_j + lambda c_S)`.
///
/// Dropped atoms are zero columns of `Xi`, so their rows of the system read
/// `lambda b_i = lambda c_i` and the solve copies the consensus value.
fn solve_support_penalized(
    x: &DataMatrix,
    support: &[usize],
    kept: impl Fn(usize) -> bool,
    target: &[f64],
    consensus: &SparseCoefVector,
    lambda: f64,
) -> (Vec<f64>, Vec<f64>) {
    let k = support.len();
    let mut gram = DMatrix::zeros(k, k);
    for a in 0..k {
        if !kept(support[a]) {
            continue;
        }
        for b in 0..k {
            if kept(support[b]) {
                gram[(a, b)] = x.col_dot(support[a], x.col(support[b]));
            }
        }
    }
    for a in 0..k {
        gram[(a, a)] += lambda;
    }
    let rhs = DVector::from_fn(k, |a, _| {
        let data_term = if kept(support[a]) { x.col_dot(support[a], target) } else { 0.0 };
        data_term + lambda * consensus.get(support[a])
    });
    let coef = spd_solve(&gram, &rhs);

    let mut residual = target.to_vec();
    for (pos, &i) in support.iter().enumerate() {
        if kept(i) {
            axpy(&mut residual, -coef[pos], x.col(i));
        }
    }
    (coef.iter().copied().collect(), residual)
}

/// Worker shared by the public entry points and the consensus loop.
///
/// `keep` lists the candidate atoms (ascending); `kept_flags`, when given,
/// marks kept atoms for the support solve (absent means everything is kept).
/// `dropped` enables the union selection rule. `exclude` removes the point's
/// own index without copying the keep set. `record` captures the coefficient
/// vector after every greedy step.
#[allow(clippy::too_many_arguments)]
pub(crate) fn damped_omp_excluding(
    x: &DataMatrix,
    keep: &[usize],
    kept_flags: Option<&[bool]>,
    dropped: Option<&[usize]>,
    exclude: usize,
    target: &[f64],
    consensus: &SparseCoefVector,
    s: usize,
    lambda: f64,
    eps: f64,
    mut record: Option<&mut Vec<SparseCoefVector>>,
) -> Result<SparseCoefVector, SolveError> {
    let n = x.num_points();
    if !keep.iter().any(|&i| i != exclude) {
        return Err(SolveError::EmptyCandidates);
    }
    let kept = |i: usize| kept_flags.map_or(true, |f| f[i]);

    let mut residual = target.to_vec();
    let mut support: Vec<usize> = Vec::with_capacity(s);
    let mut in_support = vec![false; n];
    let mut coef: Vec<f64> = Vec::new();

    while support.len() < s && norm2(&residual) > eps {
        // Best kept candidate by score; ties break to the lowest index.
        let mut best: Option<(usize, f64)> = None;
        for &i in keep {
            if i == exclude || in_support[i] {
                continue;
            }
            let psi = psi_from_dot(x.col_dot(i, &residual), consensus.get(i), lambda);
            if best.map_or(true, |(_, b)| psi > b) {
                best = Some((i, psi));
            }
        }

        let pick = if let Some(dropped) = dropped {
            // Union rule: take the kept pick only when its one-atom objective
            // beats leaving the residual untouched, i.e. when psi > 0;
            // otherwise copy the largest consensus entry among dropped atoms.
            let kept_pick = best.filter(|&(_, psi)| psi > 0.0).map(|(i, _)| i);
            match kept_pick {
                Some(i) => Some(i),
                None => {
                    let mut best_j: Option<(usize, f64)> = None;
                    for &i in dropped {
                        if i == exclude || in_support[i] {
                            continue;
                        }
                        let mag = consensus.get(i).abs();
                        if best_j.map_or(true, |(_, b)| mag > b) {
                            best_j = Some((i, mag));
                        }
                    }
                    best_j.map(|(i, _)| i).or(best.map(|(i, _)| i))
                }
            }
        } else {
            best.map(|(i, _)| i)
        };

        let Some(pick) = pick else { break };
        support.push(pick);
        in_support[pick] = true;
        let (c, r) = solve_support_penalized(x, &support, kept, target, consensus, lambda);
        coef = c;
        residual = r;
        if let Some(rec) = record.as_deref_mut() {
            rec.push(SparseCoefVector::from_entries(
                n,
                support.iter().copied().zip(coef.iter().copied()).collect(),
            ));
        }
    }

    Ok(SparseCoefVector::from_entries(
        n,
        support.iter().copied().zip(coef.iter().copied()).collect(),
    ))
}

/// Damped pursuit restricted to the kept atoms `keep` (which must not
/// contain the point's own index). With `lambda = 0` and a full keep set
/// this reduces to plain orthogonal matching pursuit.
pub fn damped_omp(
    x: &DataMatrix,
    keep: &[usize],
    target: &[f64],
    consensus: &SparseCoefVector,
    s: usize,
    lambda: f64,
    eps: f64,
) -> Result<SparseCoefVector, SolveError> {
    damped_omp_excluding(x, keep, None, None, usize::MAX, target, consensus, s, lambda, eps, None)
}

/// Damped pursuit that may also select atoms from the dropped set `dropped`
/// when no kept atom is profitable; a dropped pick copies its consensus
/// value.
#[allow(clippy::too_many_arguments)]
pub fn damped_omp_union(
    x: &DataMatrix,
    keep: &[usize],
    dropped: &[usize],
    target: &[f64],
    consensus: &SparseCoefVector,
    s: usize,
    lambda: f64,
    eps: f64,
) -> Result<SparseCoefVector, SolveError> {
    let n = x.num_points();
    let mut flags = vec![false; n];
    for &i in keep {
        flags[i] = true;
    }
    damped_omp_excluding(
        x,
        keep,
        Some(&flags),
        Some(dropped),
        usize::MAX,
        target,
        consensus,
        s,
        lambda,
        eps,
        None,
    )
}
