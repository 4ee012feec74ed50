//! Affinity construction, normalized graph Laplacian, smallest eigenpairs,
//! k-means, and the normalized-cut spectral clustering step.

mod eigs;
mod kmeans;

pub use eigs::{smallest_eigenpairs, smallest_eigenpairs_with, EigsMethod, LaplacianSpectrum};
pub use kmeans::kmeans;

use crate::sparse::SelfExpressionMatrix;
use ndarray::Array2;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("eigensolver failed to converge; achieved residuals {0:?}")]
    ConvergenceFailure(Vec<f64>),
    #[error("requested {k} eigenpairs from an order-{n} matrix")]
    TooManyEigenpairs { k: usize, n: usize },
}

/// Symmetric nonnegative sparse affinity with zero diagonal.
///
/// Entries are stored in both directions; symmetry is exact because each
/// unordered pair is computed once and mirrored.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl AffinityMatrix {
    /// Build from unordered-pair weights. Nonpositive weights are dropped;
    /// self-loops are rejected.
    pub fn from_pair_weights(n: usize, pairs: BTreeMap<(usize, usize), f64>) -> Self {
        let mut rows = vec![Vec::new(); n];
        for (&(i, j), &w) in &pairs {
            assert!(i < j, "pair weights must be keyed with i < j");
            assert!(j < n);
            if w > 0.0 {
                rows[i].push((j, w));
                rows[j].push((i, w));
            }
        }
        for r in &mut rows {
            r.sort_unstable_by_key(|&(j, _)| j);
        }
        Self { n, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|pos| self.rows[i][pos].1)
            .unwrap_or(0.0)
    }

    /// Stored entry count (each undirected edge counts twice).
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Multiply all weights by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Self {
        assert!(alpha > 0.0);
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(j, w)| (j, alpha * w)).collect())
            .collect();
        Self { n: self.n, rows }
    }

    /// Subgraph induced by `members` (ascending point indices are not
    /// required; the output is indexed by position in `members`).
    pub fn induced_subgraph(&self, members: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (p, &i) in members.iter().enumerate() {
            pos[i] = p;
        }
        let mut rows = vec![Vec::new(); members.len()];
        for (p, &i) in members.iter().enumerate() {
            for &(j, w) in &self.rows[i] {
                if pos[j] != usize::MAX {
                    rows[p].push((pos[j], w));
                }
            }
            rows[p].sort_unstable_by_key(|&(c, _)| c);
        }
        Self { n: members.len(), rows }
    }
}

/// `a_ij = (|c_ij| + |c_ji|) / 2`.
pub fn affinity_from_coefficients(c: &SelfExpressionMatrix) -> AffinityMatrix {
    let n = c.n();
    let mut pairs: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for j in 0..n {
        for (i, v) in c.column(j).iter() {
            let key = if i < j { (i, j) } else { (j, i) };
            *pairs.entry(key).or_insert(0.0) += 0.5 * v.abs();
        }
    }
    AffinityMatrix::from_pair_weights(n, pairs)
}

/// Sparse symmetric matrix with an explicit diagonal, for Laplacians.
#[derive(Debug, Clone)]
pub struct SparseSymmetric {
    diag: Vec<f64>,
    /// Off-diagonal entries, both directions, ascending column index.
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSymmetric {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|pos| self.rows[i][pos].1)
            .unwrap_or(0.0)
    }

    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.diag.len() {
            let mut acc = self.diag[i] * v[i];
            for &(j, w) in &self.rows[i] {
                acc += w * v[j];
            }
            out[i] = acc;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, w) in &self.rows[i] {
                m[(i, j)] = w;
            }
        }
        m
    }
}

/// Normalized Laplacian `L = I - D^{-1/2} A D^{-1/2}`.
///
/// Zero-degree vertices get `D^{-1/2} = 0`, so their Laplacian row is the
/// standard basis row; degenerate affinities stay total.
pub fn normalized_laplacian(a: &AffinityMatrix) -> SparseSymmetric {
    let n = a.n();
    let inv_sqrt_deg: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.degree(i);
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let rows = (0..n)
        .map(|i| {
            a.neighbors(i)
                .iter()
                .map(|&(j, w)| (j, -w * inv_sqrt_deg[i] * inv_sqrt_deg[j]))
                .collect()
        })
        .collect();
    SparseSymmetric { diag: vec![1.0; n], rows }
}

/// Normalized-cut spectral clustering: embed points with the `k_eig`
/// smallest Laplacian eigenvectors, normalize the nonzero rows, and run
/// seeded k-means into `n` clusters. Returns 1-based labels.
pub fn spectral_cluster(
    a: &AffinityMatrix,
    n: usize,
    k_eig: usize,
    seed: u64,
) -> Result<Vec<usize>, SpectralError> {
    assert!(k_eig >= n, "need at least as many eigenvectors as clusters");
    let l = normalized_laplacian(a);
    let spectrum = smallest_eigenpairs(&l, k_eig)?;
    let points = a.n();
    let mut rows = Array2::zeros((points, k_eig));
    for i in 0..points {
        let mut norm = 0.0;
        for c in 0..k_eig {
            let v = spectrum.eigenvectors[(i, c)];
            norm += v * v;
        }
        let norm = norm.sqrt();
        if norm >= 1e-12 {
            for c in 0..k_eig {
                rows[(i, c)] = spectrum.eigenvectors[(i, c)] / norm;
            }
        }
    }
    Ok(kmeans(&rows, n, seed, 20))
}

/// The `k` smallest eigenvalues of the whole-graph normalized Laplacian,
/// ascending; for eigen-gap inspection.
pub fn eigen_gap_report(a: &AffinityMatrix, k: usize) -> Result<Vec<f64>, SpectralError> {
    let l = normalized_laplacian(a);
    Ok(smallest_eigenpairs(&l, k)?.eigenvalues)
}
