//! The dropout objective and its deterministic equivalent.
//!
//! Dropping dictionary columns i.i.d. with rate `delta` (kept columns scaled
//! by `1/(1-delta)`) makes the expected self-expression residual equal to
//! the plain residual plus a squared-l2 penalty weighted by
//! `delta/(1-delta)`. The Monte-Carlo estimator here is the measurement-side
//! check of that identity.

use crate::omp::SolveError;
use crate::rng::{stream_rng, StreamPurpose};
use crate::sparse::SparseCoefVector;
use ndarray::{Array1, Array2};
use rand::Rng;

/// `||x_j - sum_i c_i x_i||^2 + (delta/(1-delta)) sum_i ||x_i||^2 c_i^2`.
///
/// Written in the general form: column norms are not assumed to be 1.
pub fn regularized_objective(
    x: &Array2<f64>,
    j: usize,
    c: &SparseCoefVector,
    delta: f64,
) -> Result<f64, SolveError> {
    if !(0.0..1.0).contains(&delta) {
        return Err(SolveError::DivergentRegularizer(delta));
    }
    let mut residual: Array1<f64> = x.column(j).to_owned();
    let mut penalty = 0.0;
    for (i, v) in c.iter() {
        let col = x.column(i);
        residual.scaled_add(-v, &col);
        penalty += col.dot(&col) * v * v;
    }
    Ok(residual.dot(&residual) + delta / (1.0 - delta) * penalty)
}

/// Monte-Carlo mean of `||x_j - sum_i xi_i c_i x_i||^2` over fresh Bernoulli
/// draws with `xi_i = 1/(1-delta)` (probability `1-delta`) or `0`.
pub fn dropout_objective_mc(
    x: &Array2<f64>,
    j: usize,
    c: &SparseCoefVector,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<f64, SolveError> {
    if !(0.0..1.0).contains(&delta) {
        return Err(SolveError::DivergentRegularizer(delta));
    }
    assert!(samples >= 1);
    let scale = 1.0 / (1.0 - delta);
    let target: Array1<f64> = x.column(j).to_owned();
    let entries: Vec<(usize, f64)> = c.iter().collect();
    let mut rng = stream_rng(seed, StreamPurpose::MonteCarlo, 0);

    let mut sum = 0.0;
    let mut y = Array1::zeros(target.len());
    for _ in 0..samples {
        y.assign(&target);
        for &(i, v) in &entries {
            if rng.gen::<f64>() >= delta {
                y.scaled_add(-scale * v, &x.column(i));
            }
        }
        sum += y.dot(&y);
    }
    Ok(sum / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::normalize_columns;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand_distr::StandardNormal;

    fn random_instance(d: usize, n: usize, nnz: usize, seed: u64) -> (Array2<f64>, SparseCoefVector) {
        let mut rng = stream_rng(seed, StreamPurpose::Points, 0);
        let raw = Array2::from_shape_fn((d, n), |_| rng.sample::<f64, _>(StandardNormal));
        let x = normalize_columns(&raw).unwrap();
        let entries = (1..=nnz).map(|i| (i, rng.sample::<f64, _>(StandardNormal))).collect();
        (x.to_array2(), SparseCoefVector::from_entries(n, entries))
    }

    #[test]
    fn zero_delta_is_plain_residual() {
        let (x, c) = random_instance(5, 12, 3, 1);
        let reg = regularized_objective(&x, 0, &c, 0.0).unwrap();
        let mc = dropout_objective_mc(&x, 0, &c, 0.0, 7, 0).unwrap();
        // No dropout: every sample equals the residual, zero variance.
        assert_abs_diff_eq!(reg, mc, epsilon = 1e-12);

        let mut residual: Array1<f64> = x.column(0).to_owned();
        for (i, v) in c.iter() {
            residual.scaled_add(-v, &x.column(i));
        }
        assert_abs_diff_eq!(reg, residual.dot(&residual), epsilon = 1e-12);
    }

    #[test]
    fn zero_coefficients_give_unit_objective() {
        let (x, _) = random_instance(6, 10, 2, 2);
        let zero = SparseCoefVector::zeros(10);
        let reg = regularized_objective(&x, 3, &zero, 0.4).unwrap();
        assert_abs_diff_eq!(reg, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn half_delta_weights_penalty_by_one() {
        let (x, c) = random_instance(7, 15, 4, 3);
        let reg = regularized_objective(&x, 2, &c, 0.5).unwrap();
        let mut residual: Array1<f64> = x.column(2).to_owned();
        for (i, v) in c.iter() {
            residual.scaled_add(-v, &x.column(i));
        }
        let expected = residual.dot(&residual) + c.norm2() * c.norm2();
        assert_abs_diff_eq!(reg, expected, epsilon = 1e-12);
    }

    #[test]
    fn single_support_two_outcome_enumeration() {
        // Support {i} at delta = 0.5: the sample is either x_j - 2 c_i x_i
        // (kept, scale 2) or x_j (dropped), each with probability 1/2.
        let raw = array![[1.0, 0.0], [0.0, 1.0]];
        let x = normalize_columns(&raw).unwrap().to_array2();
        let c_i = 0.7;
        let c = SparseCoefVector::from_entries(2, vec![(1, c_i)]);
        let reg = regularized_objective(&x, 0, &c, 0.5).unwrap();
        let kept: f64 = 1.0 + 4.0 * c_i * c_i; // ||e0 - 2 c e1||^2
        let dropped: f64 = 1.0;
        assert_abs_diff_eq!(reg, 0.5 * (kept + dropped), epsilon = 1e-12);

        let mc = dropout_objective_mc(&x, 0, &c, 0.5, 200_000, 5).unwrap();
        assert!((mc - reg).abs() / reg < 0.02);
    }

    #[test]
    fn monte_carlo_matches_closed_form_within_one_percent() {
        let (x, c) = random_instance(9, 50, 5, 8);
        for &delta in &[0.1, 0.5, 0.9] {
            let reg = regularized_objective(&x, 0, &c, delta).unwrap();
            let mc = dropout_objective_mc(&x, 0, &c, delta, 100_000, 11).unwrap();
            let rel = (mc - reg).abs() / reg;
            assert!(rel < 0.01, "delta={delta}: relative error {rel}");
        }
    }

    #[test]
    fn rejects_divergent_delta() {
        let (x, c) = random_instance(4, 8, 2, 9);
        assert!(matches!(
            regularized_objective(&x, 0, &c, 1.0),
            Err(SolveError::DivergentRegularizer(_))
        ));
    }
}
