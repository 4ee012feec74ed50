//! Data representation, normalization, synthetic union-of-subspaces
//! generation, PCA, and matrix/label file formats.

mod io;

pub use io::{
    load_labels, load_matrix, save_labels, save_matrix, LabelLoad, MatrixFormat,
};

use crate::linalg::{dot, norm2};
use crate::rng::{stream_rng, StreamPurpose};
use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("column {0} has near-zero norm and cannot be normalized")]
    ZeroColumn(usize),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("target dimension {target} exceeds min(D, N) = {limit}")]
    DimTooLarge { target: usize, limit: usize },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A D x N matrix whose columns are unit-norm data points, stored
/// column-major so per-point access is contiguous.
///
/// Construction goes through [`normalize_columns`] (or the synthetic
/// generator), so every column has unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    ambient: usize,
    points: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    /// Ambient dimension D.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    /// Number of points N.
    pub fn num_points(&self) -> usize {
        self.points
    }

    /// Point x_j as a contiguous slice.
    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.ambient..(j + 1) * self.ambient]
    }

    /// Inner product `x_i . v`.
    #[inline]
    pub fn col_dot(&self, i: usize, v: &[f64]) -> f64 {
        dot(self.col(i), v)
    }

    pub fn to_array2(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.ambient, self.points), |(i, j)| self.data[j * self.ambient + i])
    }
}

/// Ground-truth cluster labels, 1-based in `1..=n`, every index occupied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthLabels {
    labels: Vec<usize>,
    n: usize,
}

impl GroundTruthLabels {
    /// Build from 1-based labels; `n` is taken as the maximum label.
    /// Every value in `1..=n` must appear at least once.
    pub fn new(labels: Vec<usize>) -> Result<Self, DatasetError> {
        let n = labels.iter().copied().max().unwrap_or(0);
        if n == 0 {
            return Err(DatasetError::ShapeMismatch("empty label vector".into()));
        }
        let mut seen = vec![false; n + 1];
        for &l in &labels {
            if l == 0 {
                return Err(DatasetError::ShapeMismatch("labels are 1-based; found 0".into()));
            }
            seen[l] = true;
        }
        if let Some(missing) = (1..=n).find(|&l| !seen[l]) {
            return Err(DatasetError::ShapeMismatch(format!(
                "cluster index {missing} missing from 1..={n}"
            )));
        }
        Ok(Self { labels, n })
    }

    pub fn num_clusters(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// 1-based label of point j.
    pub fn label(&self, j: usize) -> usize {
        self.labels[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    /// Point indices of cluster `k` (1-based).
    pub fn cluster_members(&self, k: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&j| self.labels[j] == k).collect()
    }
}

/// Parameters of the synthetic union-of-subspaces generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    /// Number of subspaces.
    pub n: usize,
    /// Subspace dimension.
    pub d: usize,
    /// Ambient dimension.
    pub ambient_dim: usize,
    /// Points per subspace.
    pub points_per_subspace: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<(), DatasetError> {
        if self.n < 1 || self.d < 1 || self.points_per_subspace < 1 {
            return Err(DatasetError::InvalidSpec(
                "n, d and points_per_subspace must be at least 1".into(),
            ));
        }
        if self.d > self.ambient_dim {
            return Err(DatasetError::InvalidSpec(format!(
                "subspace dimension {} exceeds ambient dimension {}",
                self.d, self.ambient_dim
            )));
        }
        Ok(())
    }
}

/// Divide every column by its Euclidean norm.
pub fn normalize_columns(raw: &Array2<f64>) -> Result<DataMatrix, DatasetError> {
    let (d, n) = raw.dim();
    let mut data = vec![0.0; d * n];
    for j in 0..n {
        let col = &mut data[j * d..(j + 1) * d];
        for i in 0..d {
            col[i] = raw[(i, j)];
        }
        let norm = norm2(col);
        if norm < 1e-300 {
            return Err(DatasetError::ZeroColumn(j));
        }
        for v in col.iter_mut() {
            *v /= norm;
        }
    }
    Ok(DataMatrix { ambient: d, points: n, data })
}

/// Draw `n` random d-dimensional subspaces of R^D and sample
/// `points_per_subspace` unit-norm points uniformly on each subspace's unit
/// sphere. Deterministic in the spec's seed.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
) -> Result<(DataMatrix, GroundTruthLabels), DatasetError> {
    spec.validate()?;
    let d_amb = spec.ambient_dim;
    let n_points = spec.n * spec.points_per_subspace;
    let mut data = vec![0.0; d_amb * n_points];
    let mut labels = Vec::with_capacity(n_points);

    for subspace in 0..spec.n {
        // Basis: thin QR of a Gaussian matrix, signs fixed so R has a
        // positive diagonal. The column span is uniformly distributed over
        // d-dimensional subspaces.
        let mut rng = stream_rng(spec.seed, StreamPurpose::Basis, subspace as u64);
        let gauss = DMatrix::from_fn(d_amb, spec.d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let qr = gauss.qr();
        let mut q = qr.q();
        let r = qr.r();
        for k in 0..spec.d {
            if r[(k, k)] < 0.0 {
                q.column_mut(k).neg_mut();
            }
        }

        // Points: Gaussian coefficients in the basis, then normalized, which
        // is the uniform distribution on the subspace's unit sphere.
        let mut rng = stream_rng(spec.seed, StreamPurpose::Points, subspace as u64);
        for p in 0..spec.points_per_subspace {
            let col_idx = subspace * spec.points_per_subspace + p;
            let coeffs: Vec<f64> =
                (0..spec.d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let col = &mut data[col_idx * d_amb..(col_idx + 1) * d_amb];
            for (k, &c) in coeffs.iter().enumerate() {
                for row in 0..d_amb {
                    col[row] += q[(row, k)] * c;
                }
            }
            let norm = norm2(col);
            if norm < 1e-300 {
                // A zero Gaussian draw has probability zero; retry is not
                // worth the determinism cost, fail loudly instead.
                return Err(DatasetError::InvalidSpec("degenerate zero sample".into()));
            }
            for v in col.iter_mut() {
                *v /= norm;
            }
            labels.push(subspace + 1);
        }
    }

    Ok((
        DataMatrix { ambient: d_amb, points: n_points, data },
        GroundTruthLabels { labels, n: spec.n },
    ))
}

/// Mean-subtract the columns and project onto the top `target_dim` principal
/// directions of the centered matrix. The output is `target_dim x N` and is
/// not renormalized; chain with [`normalize_columns`] as needed.
pub fn pca_project(raw: &Array2<f64>, target_dim: usize) -> Result<Array2<f64>, DatasetError> {
    let (d, n) = raw.dim();
    let limit = d.min(n);
    if target_dim > limit {
        return Err(DatasetError::DimTooLarge { target: target_dim, limit });
    }

    let mean = raw.mean_axis(ndarray::Axis(1)).expect("nonempty matrix");
    let mut centered = raw.clone();
    for mut col in centered.columns_mut() {
        col -= &mean;
    }

    let nm = DMatrix::from_fn(d, n, |i, j| centered[(i, j)]);
    let svd = nm.svd(true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");

    // Order singular values descending; nalgebra does not guarantee order.
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite singular values")
    });

    let mut out = Array2::zeros((target_dim, n));
    for (row, &k) in order.iter().take(target_dim).enumerate() {
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..d {
                acc += u[(i, k)] * centered[(i, j)];
            }
            out[(row, j)] = acc;
        }
    }
    Ok(out)
}

/// Distance from `point` to the span of the orthonormal `basis` columns.
/// Test helper for the generator's subspace membership.
pub fn distance_to_span(basis: &DMatrix<f64>, point: &[f64]) -> f64 {
    let p = nalgebra::DVector::from_column_slice(point);
    let proj = basis * (basis.transpose() * &p);
    (&p - proj).norm()
}

/// Column mean as a vector. Helper for PCA post-condition checks.
pub fn column_mean(m: &Array2<f64>) -> Array1<f64> {
    m.mean_axis(ndarray::Axis(1)).expect("nonempty matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn normalize_three_four_five() {
        let raw = array![[3.0], [4.0]];
        let m = normalize_columns(&raw).unwrap();
        assert_abs_diff_eq!(m.col(0)[0], 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(m.col(0)[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn normalize_is_identity_on_unit_columns_and_idempotent() {
        let raw = array![[1.0, 0.6], [0.0, 0.8]];
        let m = normalize_columns(&raw).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                assert_abs_diff_eq!(m.col(j)[i], raw[(i, j)], epsilon = 1e-15);
            }
        }
        let again = normalize_columns(&m.to_array2()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn normalize_random_matrix_gives_unit_norms() {
        let mut rng = stream_rng(11, StreamPurpose::Points, 0);
        let raw = Array2::from_shape_fn((9, 50), |_| rng.sample::<f64, _>(StandardNormal));
        let m = normalize_columns(&raw).unwrap();
        for j in 0..50 {
            assert_abs_diff_eq!(norm2(m.col(j)), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_zero_column() {
        let raw = array![[1.0, 0.0], [1.0, 0.0]];
        match normalize_columns(&raw) {
            Err(DatasetError::ZeroColumn(1)) => {}
            other => panic!("expected ZeroColumn(1), got {other:?}"),
        }
    }

    #[test]
    fn synthetic_shape_and_labels() {
        let spec = SyntheticSpec { n: 5, d: 6, ambient_dim: 9, points_per_subspace: 30, seed: 7 };
        let (m, labels) = generate_synthetic(&spec).unwrap();
        assert_eq!(m.ambient_dim(), 9);
        assert_eq!(m.num_points(), 150);
        assert_eq!(labels.num_clusters(), 5);
        for k in 1..=5 {
            assert_eq!(labels.cluster_members(k).len(), 30);
        }
        for j in 0..150 {
            assert_abs_diff_eq!(norm2(m.col(j)), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn synthetic_rank_one_subspace_is_collinear() {
        let spec = SyntheticSpec { n: 1, d: 1, ambient_dim: 2, points_per_subspace: 3, seed: 3 };
        let (m, _) = generate_synthetic(&spec).unwrap();
        for j in 1..3 {
            assert_abs_diff_eq!(m.col_dot(0, m.col(j)).abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn synthetic_points_lie_on_their_subspace() {
        // Oracle: the span of a cluster's own points recovers the subspace
        // (points_per_subspace > d), so project each point onto the top-d
        // left singular vectors of its cluster and check the residual.
        let spec = SyntheticSpec { n: 4, d: 3, ambient_dim: 8, points_per_subspace: 10, seed: 21 };
        let (m, labels) = generate_synthetic(&spec).unwrap();
        for k in 1..=4 {
            let members = labels.cluster_members(k);
            let cluster = DMatrix::from_fn(8, members.len(), |i, c| m.col(members[c])[i]);
            let svd = cluster.clone().svd(true, false);
            let u = svd.u.unwrap();
            let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
            order.sort_by(|&a, &b| {
                svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap()
            });
            let basis = DMatrix::from_fn(8, 3, |i, c| u[(i, order[c])]);
            for &j in &members {
                assert!(distance_to_span(&basis, m.col(j)) <= 1e-10);
            }
        }
    }

    #[test]
    fn synthetic_is_deterministic() {
        let spec = SyntheticSpec { n: 3, d: 2, ambient_dim: 5, points_per_subspace: 4, seed: 99 };
        let (a, la) = generate_synthetic(&spec).unwrap();
        let (b, lb) = generate_synthetic(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(la.as_slice(), lb.as_slice());
    }

    #[test]
    fn synthetic_rejects_d_above_ambient() {
        let spec = SyntheticSpec { n: 1, d: 3, ambient_dim: 2, points_per_subspace: 2, seed: 0 };
        assert!(matches!(generate_synthetic(&spec), Err(DatasetError::InvalidSpec(_))));
    }

    #[test]
    fn pca_exact_on_rank_two_data() {
        // Columns in a 2-dim affine subspace of R^5.
        let mut rng = stream_rng(5, StreamPurpose::Points, 0);
        let a = Array1::from_shape_fn(5, |_| rng.sample::<f64, _>(StandardNormal));
        let b = Array1::from_shape_fn(5, |_| rng.sample::<f64, _>(StandardNormal));
        let mut raw = Array2::zeros((5, 12));
        for j in 0..12 {
            let (s, t) = (rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
            for i in 0..5 {
                raw[(i, j)] = s * a[i] + t * b[i] + 0.5;
            }
        }
        let proj = pca_project(&raw, 2).unwrap();
        // Reconstruction check: centered energy is fully captured.
        let mean = column_mean(&raw);
        let mut centered_energy = 0.0;
        for j in 0..12 {
            for i in 0..5 {
                let c = raw[(i, j)] - mean[i];
                centered_energy += c * c;
            }
        }
        let projected_energy: f64 = proj.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(projected_energy, centered_energy, epsilon = 1e-10);
    }

    #[test]
    fn pca_full_dim_preserves_centered_distances() {
        let mut rng = stream_rng(6, StreamPurpose::Points, 0);
        let raw = Array2::from_shape_fn((4, 20), |_| rng.sample::<f64, _>(StandardNormal));
        let proj = pca_project(&raw, 4).unwrap();
        let mean = column_mean(&raw);
        for a in 0..20 {
            for b in (a + 1)..20 {
                let mut dc = 0.0;
                let mut dp = 0.0;
                for i in 0..4 {
                    let ca = raw[(i, a)] - mean[i];
                    let cb = raw[(i, b)] - mean[i];
                    dc += (ca - cb) * (ca - cb);
                    dp += (proj[(i, a)] - proj[(i, b)]) * (proj[(i, a)] - proj[(i, b)]);
                }
                assert_abs_diff_eq!(dc.sqrt(), dp.sqrt(), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn pca_captured_variance_matches_singular_values() {
        let mut rng = stream_rng(13, StreamPurpose::Points, 0);
        let raw = Array2::from_shape_fn((20, 100), |_| rng.sample::<f64, _>(StandardNormal));
        let proj = pca_project(&raw, 5).unwrap();

        let mean = column_mean(&raw);
        let mut centered = raw.clone();
        for mut col in centered.columns_mut() {
            col -= &mean;
        }
        let nm = DMatrix::from_fn(20, 100, |i, j| centered[(i, j)]);
        let mut sv: Vec<f64> = nm.svd(false, false).singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());

        let captured: f64 = proj.iter().map(|v| v * v).sum();
        let expected: f64 = sv.iter().take(5).map(|s| s * s).sum();
        let total: f64 = sv.iter().map(|s| s * s).sum();
        let frob: f64 = centered.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(captured / frob, expected / total, epsilon = 1e-10);
    }

    #[test]
    fn pca_output_has_zero_column_mean() {
        let mut rng = stream_rng(14, StreamPurpose::Points, 0);
        let raw = Array2::from_shape_fn((6, 30), |_| rng.sample::<f64, _>(StandardNormal) + 2.0);
        let proj = pca_project(&raw, 3).unwrap();
        let mean = column_mean(&proj);
        for v in mean.iter() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pca_rejects_oversized_target() {
        let raw = Array2::zeros((3, 5));
        assert!(matches!(
            pca_project(&raw, 4),
            Err(DatasetError::DimTooLarge { target: 4, limit: 3 })
        ));
    }
}
