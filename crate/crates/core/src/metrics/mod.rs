//! Evaluation metrics: permutation-matched clustering accuracy,
//! subspace-preserving representation error, and algebraic connectivity.

mod assignment;

pub use assignment::max_matching_total;

use crate::dataset::GroundTruthLabels;
use crate::sparse::SelfExpressionMatrix;
use crate::spectral::{smallest_eigenpairs, normalized_laplacian, AffinityMatrix};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("label vectors have different lengths: {est} vs {truth}")]
    LengthMismatch { est: usize, truth: usize },
}

/// Per-run evaluation summary.
#[derive(Debug, Clone)]
pub struct ClusteringReport {
    /// Permutation-matched accuracy in percent.
    pub accuracy_pct: f64,
    /// Subspace-preserving representation error in percent.
    pub sre_pct: f64,
    /// Minimum per-cluster algebraic connectivity.
    pub conn_min: f64,
    /// Mean per-cluster algebraic connectivity.
    pub conn_mean: f64,
    /// Second-smallest normalized-Laplacian eigenvalue of each ground-truth
    /// cluster's induced subgraph.
    pub per_cluster_lambda2: Vec<f64>,
    /// Clusters of size one (their connectivity is defined as zero).
    pub singleton_clusters: Vec<usize>,
    pub wall_time_s: f64,
}

impl ClusteringReport {
    /// Line-oriented human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("accuracy:  {:.2}%\n", self.accuracy_pct));
        out.push_str(&format!("sre:       {:.2}%\n", self.sre_pct));
        out.push_str(&format!("conn min:  {:.4}\n", self.conn_min));
        out.push_str(&format!("conn mean: {:.4}\n", self.conn_mean));
        let lambdas: Vec<String> =
            self.per_cluster_lambda2.iter().map(|v| format!("{v:.4}")).collect();
        out.push_str(&format!("lambda2 per cluster: [{}]\n", lambdas.join(", ")));
        if !self.singleton_clusters.is_empty() {
            out.push_str(&format!(
                "singleton clusters (connectivity defined as 0): {:?}\n",
                self.singleton_clusters
            ));
        }
        out.push_str(&format!("wall time: {:.3}s\n", self.wall_time_s));
        out
    }
}

/// Permutation-matched clustering accuracy in percent: the best one-to-one
/// matching between estimated and true cluster names, via optimal assignment
/// on the contingency matrix. Handles unequal cluster counts.
pub fn clustering_accuracy(
    est: &[usize],
    truth: &GroundTruthLabels,
) -> Result<f64, MetricsError> {
    if est.len() != truth.len() {
        return Err(MetricsError::LengthMismatch { est: est.len(), truth: truth.len() });
    }
    let n_points = est.len();

    // Dense renaming of the estimated labels (they may have gaps when
    // k-means leaves a cluster empty).
    let mut est_names: Vec<usize> = est.to_vec();
    est_names.sort_unstable();
    est_names.dedup();
    let est_index = |l: usize| est_names.binary_search(&l).expect("renamed from est");

    let n_est = est_names.len();
    let n_true = truth.num_clusters();
    let mut counts = vec![vec![0u64; n_true]; n_est];
    for j in 0..n_points {
        counts[est_index(est[j])][truth.label(j) - 1] += 1;
    }
    let matched = max_matching_total(&counts);
    Ok(100.0 * matched as f64 / n_points as f64)
}

/// Subspace-preserving representation error in percent: the average fraction
/// of each column's l1 mass placed on wrong-cluster entries. Columns with no
/// mass at all count as fully non-preserving.
pub fn subspace_preserving_error(c: &SelfExpressionMatrix, truth: &GroundTruthLabels) -> f64 {
    assert_eq!(c.n(), truth.len());
    let n = c.n();
    let mut total = 0.0;
    for j in 0..n {
        let col = c.column(j);
        let l1 = col.norm1();
        let preserved = if l1 > 0.0 {
            let same: f64 = col
                .iter()
                .filter(|&(i, _)| truth.label(i) == truth.label(j))
                .map(|(_, v)| v.abs())
                .sum();
            same / l1
        } else {
            0.0
        };
        total += 1.0 - preserved;
    }
    100.0 * total / n as f64
}

/// Second-smallest normalized-Laplacian eigenvalue of each ground-truth
/// cluster's induced subgraph. Singleton clusters get 0.
pub fn per_cluster_lambda2(a: &AffinityMatrix, truth: &GroundTruthLabels) -> Vec<f64> {
    assert_eq!(a.n(), truth.len());
    (1..=truth.num_clusters())
        .into_par_iter()
        .map(|k| {
            let members = truth.cluster_members(k);
            if members.len() < 2 {
                return 0.0;
            }
            let sub = a.induced_subgraph(&members);
            let l = normalized_laplacian(&sub);
            let spectrum = smallest_eigenpairs(&l, 2).expect("k=2 <= cluster size");
            // Clamp the tiny negative rounding of an exact zero.
            spectrum.eigenvalues[1].max(0.0)
        })
        .collect()
}

/// Minimum per-cluster algebraic connectivity.
pub fn connectivity_min(a: &AffinityMatrix, truth: &GroundTruthLabels) -> f64 {
    per_cluster_lambda2(a, truth).into_iter().fold(f64::INFINITY, f64::min)
}

/// Mean per-cluster algebraic connectivity.
pub fn connectivity_mean(a: &AffinityMatrix, truth: &GroundTruthLabels) -> f64 {
    let l = per_cluster_lambda2(a, truth);
    l.iter().sum::<f64>() / l.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseCoefVector;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn truth(labels: Vec<usize>) -> GroundTruthLabels {
        GroundTruthLabels::new(labels).unwrap()
    }

    #[test]
    fn accuracy_identity_and_permutation() {
        let t = truth(vec![1, 1, 2, 2, 3, 3]);
        assert_eq!(clustering_accuracy(t.as_slice(), &t).unwrap(), 100.0);
        // Rename clusters 1->3, 2->1, 3->2.
        let renamed = vec![3, 3, 1, 1, 2, 2];
        assert_eq!(clustering_accuracy(&renamed, &t).unwrap(), 100.0);
    }

    #[test]
    fn accuracy_handles_unequal_cluster_counts() {
        let t = truth(vec![1, 1, 2, 2]);
        // Estimate splits cluster 1 into two.
        let est = vec![1, 3, 2, 2];
        let acc = clustering_accuracy(&est, &t).unwrap();
        assert_abs_diff_eq!(acc, 75.0, epsilon = 1e-12);
    }

    #[test]
    fn accuracy_rejects_length_mismatch() {
        let t = truth(vec![1, 2]);
        assert!(matches!(
            clustering_accuracy(&[1, 2, 1], &t),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    fn factorial_accuracy(est: &[usize], t: &GroundTruthLabels) -> f64 {
        // Oracle: maximum over all permutations of the true cluster names.
        let n = t.num_clusters();
        let est_max = *est.iter().max().unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = 0usize;
        fn rec(
            perm: &mut Vec<usize>,
            k: usize,
            est: &[usize],
            t: &GroundTruthLabels,
            est_max: usize,
            best: &mut usize,
        ) {
            if k == perm.len() {
                // perm maps true cluster (1-based index - 1) to an estimated
                // name slot; count exact agreements.
                let matches = est
                    .iter()
                    .zip(t.as_slice())
                    .filter(|&(&e, &tr)| e <= est_max && perm[tr - 1] + 1 == e)
                    .count();
                *best = (*best).max(matches);
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                rec(perm, k + 1, est, t, est_max, best);
                perm.swap(k, i);
            }
        }
        rec(&mut perm, 0, est, t, est_max, &mut best);
        100.0 * best as f64 / est.len() as f64
    }

    #[test]
    fn accuracy_matches_factorial_oracle() {
        use crate::rng::{stream_rng, StreamPurpose};
        use rand::Rng;
        for seed in 0..50 {
            let mut rng = stream_rng(seed, StreamPurpose::Points, 3);
            let n = rng.gen_range(2..=5);
            let len = rng.gen_range(n..=20);
            // Truth must cover 1..=n.
            let mut t: Vec<usize> = (1..=n).collect();
            for _ in n..len {
                t.push(rng.gen_range(1..=n));
            }
            let est: Vec<usize> = (0..len).map(|_| rng.gen_range(1..=n)).collect();
            let t = truth(t);
            let fast = clustering_accuracy(&est, &t).unwrap();
            let slow = factorial_accuracy(&est, &t);
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
        }
    }

    fn matrix_from_triples(n: usize, triples: &[(usize, usize, f64)]) -> SelfExpressionMatrix {
        let mut cols = vec![Vec::new(); n];
        for &(i, j, v) in triples {
            cols[j].push((i, v));
        }
        SelfExpressionMatrix::from_columns(
            cols.into_iter().map(|c| SparseCoefVector::from_entries(n, c)).collect(),
        )
    }

    #[test]
    fn sre_zero_for_subspace_preserving_matrix() {
        let t = truth(vec![1, 1, 2, 2]);
        let c = matrix_from_triples(4, &[(1, 0, 0.5), (0, 1, -0.3), (3, 2, 1.0), (2, 3, 0.7)]);
        assert_eq!(subspace_preserving_error(&c, &t), 0.0);
    }

    #[test]
    fn sre_hundred_for_fully_wrong_matrix() {
        let t = truth(vec![1, 1, 2, 2]);
        let c = matrix_from_triples(4, &[(2, 0, 0.5), (3, 1, -0.3), (0, 2, 1.0), (1, 3, 0.7)]);
        assert_eq!(subspace_preserving_error(&c, &t), 100.0);
    }

    #[test]
    fn sre_quarter_mass_off_cluster() {
        // Every column: 3/4 of the l1 mass in-cluster, 1/4 off-cluster.
        let t = truth(vec![1, 1, 2, 2]);
        let c = matrix_from_triples(
            4,
            &[
                (1, 0, 0.75),
                (2, 0, 0.25),
                (0, 1, 0.75),
                (3, 1, -0.25),
                (3, 2, 0.75),
                (0, 2, 0.25),
                (2, 3, 0.75),
                (1, 3, 0.25),
            ],
        );
        assert_abs_diff_eq!(subspace_preserving_error(&c, &t), 25.0, epsilon = 1e-12);
    }

    #[test]
    fn sre_zero_column_counts_as_fully_nonpreserving() {
        let t = truth(vec![1, 1, 2]);
        // Column 2 is empty.
        let c = matrix_from_triples(3, &[(1, 0, 1.0), (0, 1, 1.0)]);
        assert_abs_diff_eq!(subspace_preserving_error(&c, &t), 100.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sre_invariant_under_column_rescaling() {
        let t = truth(vec![1, 1, 2, 2]);
        let a = matrix_from_triples(4, &[(1, 0, 0.3), (2, 0, 0.1), (0, 1, 1.0), (3, 2, 0.5), (2, 3, 0.2)]);
        let b = matrix_from_triples(4, &[(1, 0, 1.5), (2, 0, 0.5), (0, 1, 1.0), (3, 2, 0.5), (2, 3, 0.2)]);
        assert_abs_diff_eq!(
            subspace_preserving_error(&a, &t),
            subspace_preserving_error(&b, &t),
            epsilon = 1e-12
        );
    }

    fn complete_blocks(sizes: &[usize]) -> (AffinityMatrix, GroundTruthLabels) {
        let n: usize = sizes.iter().sum();
        let mut pairs = BTreeMap::new();
        let mut labels = Vec::new();
        let mut offset = 0;
        for (b, &m) in sizes.iter().enumerate() {
            for i in 0..m {
                labels.push(b + 1);
                for j in (i + 1)..m {
                    pairs.insert((offset + i, offset + j), 1.0);
                }
            }
            offset += m;
        }
        (AffinityMatrix::from_pair_weights(n, pairs), truth(labels))
    }

    #[test]
    fn complete_blocks_have_known_connectivity() {
        // K_m normalized Laplacian: lambda_2 = m/(m-1).
        let (a, t) = complete_blocks(&[4, 6, 3]);
        let l2 = per_cluster_lambda2(&a, &t);
        assert_abs_diff_eq!(l2[0], 4.0 / 3.0, epsilon = 1e-8);
        assert_abs_diff_eq!(l2[1], 6.0 / 5.0, epsilon = 1e-8);
        assert_abs_diff_eq!(l2[2], 3.0 / 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(connectivity_min(&a, &t), 6.0 / 5.0, epsilon = 1e-8);
        let mean = (4.0 / 3.0 + 6.0 / 5.0 + 3.0 / 2.0) / 3.0;
        assert_abs_diff_eq!(connectivity_mean(&a, &t), mean, epsilon = 1e-8);
    }

    #[test]
    fn disconnected_cluster_zeroes_min_but_not_mean() {
        // Cluster 2's subgraph has two components (edge only within halves).
        let mut pairs = BTreeMap::new();
        pairs.insert((0, 1), 1.0);
        pairs.insert((2, 3), 1.0);
        // No edge between {2,3} and {4}: cluster 2 = {2,3,4} disconnected.
        let a = AffinityMatrix::from_pair_weights(5, pairs);
        let t = truth(vec![1, 1, 2, 2, 2]);
        let l2 = per_cluster_lambda2(&a, &t);
        assert_abs_diff_eq!(l2[1], 0.0, epsilon = 1e-10);
        assert!(connectivity_min(&a, &t) == 0.0);
        assert!(connectivity_mean(&a, &t) > 0.0);
    }

    #[test]
    fn empty_intra_cluster_affinity_gives_zero() {
        let a = AffinityMatrix::from_pair_weights(4, BTreeMap::new());
        let t = truth(vec![1, 1, 2, 2]);
        assert_eq!(per_cluster_lambda2(&a, &t), vec![0.0, 0.0]);
    }

    #[test]
    fn singleton_cluster_is_zero() {
        let mut pairs = BTreeMap::new();
        pairs.insert((1, 2), 1.0);
        let a = AffinityMatrix::from_pair_weights(3, pairs);
        let t = truth(vec![1, 2, 2]);
        let l2 = per_cluster_lambda2(&a, &t);
        assert_eq!(l2[0], 0.0);
        assert_abs_diff_eq!(l2[1], 2.0, epsilon = 1e-10);
    }

    #[test]
    fn connectivity_invariant_under_scaling() {
        let (a, t) = complete_blocks(&[5, 4]);
        let before = per_cluster_lambda2(&a, &t);
        let after = per_cluster_lambda2(&a.scaled(3.7), &t);
        for (x, y) in before.iter().zip(&after) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
}
