//! Compressed sparse row storage for square real matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::math;
use crate::{Error, Result};

/// Square sparse matrix in CSR form.
///
/// Column indices are strictly increasing within each row and no explicit
/// zeros are stored once a matrix has been finalized.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Coordinate-format accumulator. Duplicates are summed on [`build`](Self::build)
/// in insertion order, so the result is bit-reproducible for a fixed input order.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self { n, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(mut self) -> CsrMatrix {
        // stable: equal (row, col) keys keep insertion order
        self.entries.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values = Vec::with_capacity(self.entries.len());
        let mut k = 0;
        while k < self.entries.len() {
            let (r, c, _) = self.entries[k];
            let mut sum = 0.0;
            while k < self.entries.len() && self.entries[k].0 == r && self.entries[k].1 == c {
                sum += self.entries[k].2;
                k += 1;
            }
            if sum != 0.0 {
                col_idx.push(c);
                values.push(sum);
                row_ptr[r + 1] += 1;
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n: self.n, row_ptr, col_idx, values }
    }
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating the structure.
    pub fn from_raw(n: usize, row_ptr: Vec<usize>, col_idx: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if row_ptr.len() != n + 1 || row_ptr[0] != 0 || row_ptr[n] != col_idx.len() {
            return Err(Error::InvalidArgument("inconsistent row pointer array".into()));
        }
        if col_idx.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: col_idx.len(), found: values.len() });
        }
        for i in 0..n {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidArgument("row pointers must be nondecreasing".into()));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            if cols.iter().any(|&c| c >= n) || cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "row {i}: column indices must be in range and strictly increasing"
                )));
            }
        }
        Ok(Self { n, row_ptr, col_idx, values })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut b = TripletBuilder::with_capacity(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            b.push(i, i, d);
        }
        b.build()
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let n = a.dim();
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            for j in 0..n {
                b.push(i, j, a[(i, j)]);
            }
        }
        b.build()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.n {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[p];
                let q = next[c];
                next[c] += 1;
                col_idx[q] = i;
                values[q] = self.values[p];
            }
        }
        Self { n: self.n, row_ptr, col_idx, values }
    }

    /// `alpha * self + beta * other`, merging sparsity patterns row by row.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(self.nnz() + other.nnz());
        let mut values = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < ca.len() || q < cb.len() {
                let (c, v) = if q == cb.len() || (p < ca.len() && ca[p] < cb[q]) {
                    p += 1;
                    (ca[p - 1], alpha * va[p - 1])
                } else if p == ca.len() || cb[q] < ca[p] {
                    q += 1;
                    (cb[q - 1], beta * vb[q - 1])
                } else {
                    p += 1;
                    q += 1;
                    (ca[p - 1], alpha * va[p - 1] + beta * vb[q - 1])
                };
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { n: self.n, row_ptr, col_idx, values })
    }

    pub fn add(&self, other: &CsrMatrix) -> Result<Self> {
        self.linear_combination(1.0, other, 1.0)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zeros(self.n);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `diag(left) * A * diag(right)`
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, &l) in left.iter().enumerate().take(self.n) {
            for p in out.row_ptr[i]..out.row_ptr[i + 1] {
                out.values[p] *= l * right[out.col_idx[p]];
            }
        }
        out
    }

    /// `(A + Aᵀ) / 2`
    pub fn symmetric_part(&self) -> Self {
        self.linear_combination(0.5, &self.transpose(), 0.5).expect("same dimension")
    }

    /// `(A − Aᵀ) / 2`; antisymmetric by construction.
    pub fn skew_part(&self) -> Self {
        self.linear_combination(0.5, &self.transpose(), -0.5).expect("same dimension")
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(math::abs(v)))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).1.iter().map(|v| math::abs(*v)).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest `|A_ij − A_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let t = self.transpose();
        self.linear_combination(1.0, &t, -1.0).expect("same dimension").max_abs()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                a[(i, j)] = v;
            }
        }
        a
    }

    /// Symmetric permutation `B = Π A Πᵀ` with `B[k][l] = A[perm[k]][perm[l]]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        let mut inv = vec![0usize; self.n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let mut b = TripletBuilder::with_capacity(self.n, self.nnz());
        for (k, &old) in perm.iter().enumerate() {
            let (cols, vals) = self.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                b.push(k, inv[c], v);
            }
        }
        b.build()
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CsrMatrix {
        let mut b = TripletBuilder::new(3);
        b.push(0, 0, 2.0);
        b.push(0, 2, 1.0);
        b.push(1, 1, 3.0);
        b.push(2, 0, -1.0);
        b.push(2, 2, 4.0);
        b.push(2, 2, 1.0);
        b.build()
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let mut b = TripletBuilder::new(2);
        b.push(0, 1, 1.0);
        b.push(0, 1, -1.0);
        b.push(1, 0, 2.5);
        let m = b.build();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), 2.5);
        assert_eq!(sample().get(2, 2), 5.0);
    }

    #[test]
    fn matvec_and_transpose() {
        let a = sample();
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0, 4.0]);
        let t = a.transpose();
        assert_eq!(t.get(0, 2), -1.0);
        assert_eq!(t.get(2, 0), 1.0);
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn split_parts_recombine() {
        let a = sample();
        let s = a.symmetric_part();
        let k = a.skew_part();
        assert_eq!(s.symmetry_defect(), 0.0);
        assert_eq!(k.add(&k.transpose()).unwrap().nnz(), 0);
        let back = s.add(&k).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn from_raw_rejects_unsorted_columns() {
        let err = CsrMatrix::from_raw(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]);
        assert!(err.is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let a = sample();
        let perm = [2, 0, 1];
        let b = a.permute_symmetric(&perm);
        assert_eq!(b.get(0, 0), a.get(2, 2));
        assert_eq!(b.get(0, 1), a.get(2, 0));
        let inv = [1, 2, 0];
        assert_eq!(b.permute_symmetric(&inv), a);
    }
}
