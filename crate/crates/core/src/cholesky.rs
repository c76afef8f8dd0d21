//! Up-looking sparse Cholesky factorization `Π A Πᵀ = L Lᵀ` for symmetric
//! positive definite matrices.
//!
//! The symbolic phase computes the elimination tree and exact column counts;
//! the numeric phase builds `L` one row at a time from the row pattern given by
//! the elimination-tree reach of each column of the permuted upper triangle.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::ordering;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Sparse lower-triangular factor stored by columns (diagonal first).
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Column-oriented upper triangle of `Π A Πᵀ`.
struct UpperCsc {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl UpperCsc {
    fn new(a: &CsrMatrix, perm: &[usize]) -> Self {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        // symmetric A: row `old` of A is column `old` of A
        let mut ptr = vec![0usize; n + 1];
        let mut idx = Vec::with_capacity(a.nnz() / 2 + n);
        let mut val = Vec::with_capacity(a.nnz() / 2 + n);
        for (k, &old) in perm.iter().enumerate() {
            let (cols, vals) = a.row(old);
            for (&c, &v) in cols.iter().zip(vals) {
                let i = inv[c];
                if i <= k {
                    idx.push(i);
                    val.push(v);
                }
            }
            ptr[k + 1] = idx.len();
        }
        Self { ptr, idx, val }
    }

    fn column(&self, k: usize) -> (&[usize], &[f64]) {
        let r = self.ptr[k]..self.ptr[k + 1];
        (&self.idx[r.clone()], &self.val[r])
    }
}

fn elimination_tree(c: &UpperCsc, n: usize) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        let (rows, _) = c.column(k);
        for &row in rows {
            let mut i = row;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                    break;
                }
                i = next;
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of `L` (excluding the diagonal), written to
/// `stack[top..]` in an order valid for the up-looking update.
fn ereach(c: &UpperCsc, k: usize, parent: &[usize], stack: &mut [usize], mark: &mut [usize]) -> usize {
    let n = stack.len();
    let mut top = n;
    let stamp = k + 1;
    mark[k] = stamp;
    let (rows, _) = c.column(k);
    for &row in rows {
        let mut i = row;
        if i > k {
            continue;
        }
        let mut len = 0;
        while mark[i] != stamp {
            stack[len] = i;
            len += 1;
            mark[i] = stamp;
            i = parent[i];
        }
        while len > 0 {
            top -= 1;
            len -= 1;
            stack[top] = stack[len];
        }
    }
    top
}

impl SparseCholesky {
    /// Factors `a` with a nested-dissection ordering.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let perm = ordering::nested_dissection(a);
        Self::factor_with_ordering(a, perm)
    }

    /// Factors `a` with a caller-supplied ordering (`perm[new] = old`).
    pub fn factor_with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        if perm.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: perm.len() });
        }
        let c = UpperCsc::new(a, &perm);
        let parent = elimination_tree(&c, n);
        let mut stack = vec![0usize; n];
        let mut mark = vec![0usize; n];

        // symbolic: column counts from the row patterns
        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(&c, k, &parent, &mut stack, &mut mark);
            for &j in &stack[top..] {
                counts[j] += 1;
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + counts[j];
        }
        let nnz = col_ptr[n];
        let mut row_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut next: Vec<usize> = col_ptr[..n].to_vec();
        let mut x = vec![0.0; n];
        mark.iter_mut().for_each(|m| *m = 0);

        // numeric
        for k in 0..n {
            let top = ereach(&c, k, &parent, &mut stack, &mut mark);
            let (rows, vals) = c.column(k);
            for (&i, &v) in rows.iter().zip(vals) {
                x[i] += v;
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &stack[top..] {
                let lki = x[i] / values[col_ptr[i]];
                x[i] = 0.0;
                for p in col_ptr[i] + 1..next[i] {
                    x[row_idx[p]] -= values[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                row_idx[p] = k;
                values[p] = lki;
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: k, value: d });
            }
            let p = next[k];
            next[k] += 1;
            row_idx[p] = k;
            values[p] = math::sqrt(d);
        }
        Ok(Self { n, perm, col_ptr, row_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Nonzeros of `L`, diagonal included.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Solves `L y = b` in place (permuted coordinates).
    pub fn solve_lower_in_place(&self, x: &mut [f64]) {
        for j in 0..self.n {
            let p0 = self.col_ptr[j];
            let xj = x[j] / self.values[p0];
            x[j] = xj;
            for p in p0 + 1..self.col_ptr[j + 1] {
                x[self.row_idx[p]] -= self.values[p] * xj;
            }
        }
    }

    /// Solves `Lᵀ y = b` in place (permuted coordinates).
    pub fn solve_upper_in_place(&self, x: &mut [f64]) {
        for j in (0..self.n).rev() {
            let p0 = self.col_ptr[j];
            let mut s = x[j];
            for p in p0 + 1..self.col_ptr[j + 1] {
                s -= self.values[p] * x[self.row_idx[p]];
            }
            x[j] = s / self.values[p0];
        }
    }

    /// Solves `A x = b`.
    pub fn solve_into(&self, b: &[f64], x: &mut [f64], work: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        for (k, &old) in self.perm.iter().enumerate() {
            work[k] = b[old];
        }
        self.solve_lower_in_place(work);
        self.solve_upper_in_place(work);
        for (k, &old) in self.perm.iter().enumerate() {
            x[old] = work[k];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        let mut work = vec![0.0; self.n];
        self.solve_into(b, &mut x, &mut work);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::sparse::TripletBuilder;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd_sparse(n: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = TripletBuilder::new(n);
        let mut diag = vec![1.0; n];
        for _ in 0..3 * n {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let v: f64 = rng.gen_range(-1.0..1.0);
            b.push(i, j, v);
            b.push(j, i, v);
            diag[i] += v.abs();
            diag[j] += v.abs();
        }
        for (i, d) in diag.into_iter().enumerate() {
            b.push(i, i, d);
        }
        b.build()
    }

    #[test]
    fn solves_random_spd_systems() {
        for (n, seed) in [(1, 0), (5, 1), (60, 2), (300, 3)] {
            let a = random_spd_sparse(n, seed);
            let f = SparseCholesky::factor(&a).unwrap();
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
            let b = a.mul_vec(&x);
            let y = f.solve(&b);
            for (u, v) in x.iter().zip(&y) {
                assert!((u - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn factor_matches_dense_cholesky() {
        let a = random_spd_sparse(40, 7);
        let n = a.dim();
        let identity: Vec<usize> = (0..n).collect();
        let f = SparseCholesky::factor_with_ordering(&a, identity).unwrap();
        let dense = a.to_dense().cholesky().unwrap();
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            for p in f.col_ptr[j]..f.col_ptr[j + 1] {
                l[(f.row_idx[p], j)] = f.values[p];
            }
        }
        assert!(l.linear_combination(1.0, &dense, -1.0).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let mut b = TripletBuilder::new(2);
        b.push(0, 0, 1.0);
        b.push(0, 1, 2.0);
        b.push(1, 0, 2.0);
        b.push(1, 1, 1.0);
        let err = SparseCholesky::factor(&b.build()).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }
}
