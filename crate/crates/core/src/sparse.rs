//! Sparse coefficient vectors and the N x N self-expression matrix.

/// A sparse length-`len` coefficient vector: ordered support plus values.
///
/// This is the `b_j` / `c_j` object produced by the pursuit solvers. The
/// self-index is never part of the support (the self-expression constraint
/// `c_jj = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoefVector {
    len: usize,
    /// (index, value) pairs sorted by index; values may be zero only
    /// transiently (public constructors drop exact zeros).
    entries: Vec<(usize, f64)>,
}

impl SparseCoefVector {
    /// An all-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        Self { len, entries: Vec::new() }
    }

    /// Build from (index, value) pairs. Sorts by index, drops exact zeros.
    ///
    /// Panics if an index is out of range or repeated.
    pub fn from_entries(len: usize, mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate index {} in sparse vector", w[0].0);
        }
        if let Some(&(i, _)) = entries.last() {
            assert!(i < len, "index {i} out of range for length {len}");
        }
        entries.retain(|&(_, v)| v != 0.0);
        Self { len, entries }
    }

    /// Build from a dense slice, keeping nonzero entries.
    pub fn from_dense(dense: &[f64]) -> Self {
        let entries = dense
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
            .collect();
        Self { len: dense.len(), entries }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// (index, value) pairs in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Support indices in ascending order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    /// Value at index `i` (zero if not in the support).
    pub fn get(&self, i: usize) -> f64 {
        match self.entries.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }

    pub fn norm2(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn norm1(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v.abs()).sum()
    }

    /// Euclidean distance to another sparse vector of the same length.
    pub fn dist2(&self, other: &Self) -> f64 {
        assert_eq!(self.len, other.len);
        let mut sum = 0.0;
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            match (self.entries.get(a), other.entries.get(b)) {
                (Some(&(ia, va)), Some(&(ib, vb))) => {
                    if ia == ib {
                        let d = va - vb;
                        sum += d * d;
                        a += 1;
                        b += 1;
                    } else if ia < ib {
                        sum += va * va;
                        a += 1;
                    } else {
                        sum += vb * vb;
                        b += 1;
                    }
                }
                (Some(&(_, va)), None) => {
                    sum += va * va;
                    a += 1;
                }
                (None, Some(&(_, vb))) => {
                    sum += vb * vb;
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        sum.sqrt()
    }

    /// Maximum absolute elementwise difference to another vector.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len, other.len);
        let da = self.to_dense();
        let db = other.to_dense();
        da.iter()
            .zip(&db)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Sparse N x N self-expression matrix `C` with zero diagonal, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfExpressionMatrix {
    n: usize,
    columns: Vec<SparseCoefVector>,
}

impl SelfExpressionMatrix {
    /// Assemble from per-point coefficient columns.
    ///
    /// Panics if a column has the wrong length or a nonzero diagonal entry.
    pub fn from_columns(columns: Vec<SparseCoefVector>) -> Self {
        let n = columns.len();
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "column {j} has length {} != {n}", col.len());
            assert_eq!(col.get(j), 0.0, "nonzero diagonal entry at column {j}");
        }
        Self { n, columns }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> &SparseCoefVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseCoefVector] {
        &self.columns
    }

    /// Total stored nonzero count.
    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseCoefVector::nnz).sum()
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j].get(i)
    }

    /// Frobenius norm of the difference, relative to the norm of `old`:
    /// `||new - old||_F / max(||old||_F, 1e-12)`.
    pub fn relative_change(new: &Self, old: &Self) -> f64 {
        assert_eq!(new.n, old.n);
        let mut diff = 0.0;
        let mut base = 0.0;
        for j in 0..old.n {
            let d = new.columns[j].dist2(&old.columns[j]);
            diff += d * d;
            let b = old.columns[j].norm2();
            base += b * b;
        }
        diff.sqrt() / base.sqrt().max(1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_vector_roundtrip_and_norms() {
        let v = SparseCoefVector::from_entries(6, vec![(4, -2.0), (1, 3.0), (2, 0.0)]);
        assert_eq!(v.nnz(), 2);
        assert_eq!(v.get(1), 3.0);
        assert_eq!(v.get(2), 0.0);
        assert_eq!(v.to_dense(), vec![0.0, 3.0, 0.0, 0.0, -2.0, 0.0]);
        assert_eq!(v.norm1(), 5.0);
        assert!((v.norm2() - 13.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sparse_distance_matches_dense() {
        let a = SparseCoefVector::from_entries(5, vec![(0, 1.0), (3, 2.0)]);
        let b = SparseCoefVector::from_entries(5, vec![(3, -1.0), (4, 0.5)]);
        let dense: f64 = a
            .to_dense()
            .iter()
            .zip(b.to_dense())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert!((a.dist2(&b) - dense).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "nonzero diagonal")]
    fn self_expression_rejects_diagonal() {
        let col = SparseCoefVector::from_entries(2, vec![(0, 1.0)]);
        let other = SparseCoefVector::zeros(2);
        SelfExpressionMatrix::from_columns(vec![col, other]);
    }
}
