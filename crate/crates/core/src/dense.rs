//! Dense row-major matrices and the eigenvalue routines used by the spectral
//! analysis: Householder tridiagonalization (symmetric and skew-symmetric) and
//! implicit QL on the resulting tridiagonal matrix.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            a[(i, i)] = 1.0;
        }
        a
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut a = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = f(i, j);
            }
        }
        a
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| crate::vector::dot(self.row(i), x)).collect()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut c = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let brow = other.row(k);
                let crow = c.row_mut(i);
                for j in 0..n {
                    crow[j] += a * brow[j];
                }
            }
        }
        c
    }

    /// `alpha * self + beta * other`
    pub fn linear_combination(&self, alpha: f64, other: &DenseMatrix, beta: f64) -> DenseMatrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| alpha * a + beta * b).collect();
        DenseMatrix { n: self.n, data }
    }

    pub fn max_abs(&self) -> f64 {
        crate::vector::max_abs(&self.data)
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<DenseLu> {
        let n = self.n;
        let mut a = self.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = math::abs(a[(k, k)]);
            for i in k + 1..n {
                let v = math::abs(a[(i, k)]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::InvalidArgument(alloc::format!("singular matrix at column {k}")));
            }
            if p != k {
                piv.swap(p, k);
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        a.data[i * n + j] -= l * a.data[k * n + j];
                    }
                }
            }
        }
        Ok(DenseLu { lu: a, piv })
    }

    /// Lower Cholesky factor `L` with `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<DenseMatrix> {
        let n = self.n;
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = math::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(l)
    }
}

#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DenseMatrix,
    piv: Vec<usize>,
}

impl DenseLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        x
    }

    /// `A⁻¹ B`, column by column.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.lu.n;
        let mut out = DenseMatrix::zeros(n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b[(i, j)];
            }
            let x = self.solve(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

/// Eigenvalues of a real symmetric matrix, ascending. Only the lower triangle
/// is read.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let mut work = a.clone();
    let (mut d, mut e) = tridiagonalize_symmetric(&mut work);
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Moduli `μ ≥ 0` of the eigenvalues `±iμ` of a real skew-symmetric matrix,
/// returned as the ascending real sequence `{−μ, …, +μ}` (symmetric about zero,
/// with a zero for odd dimension). Only the strict lower triangle is read.
pub fn skew_symmetric_spectrum(a: &DenseMatrix) -> Result<Vec<f64>> {
    let mut work = a.clone();
    let e_sub = tridiagonalize_skew(&mut work);
    // A skew tridiagonal matrix with off-diagonal e is unitarily similar to
    // i·J, J symmetric tridiagonal with zero diagonal and off-diagonal e.
    let n = a.dim();
    let mut d = vec![0.0; n];
    let mut e = e_sub;
    tridiagonal_eigenvalues(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    // eig(J) is exactly symmetric in exact arithmetic; enforce it bitwise.
    let mut out = vec![0.0; n];
    for k in 0..n / 2 {
        let mu = 0.5 * (math::abs(d[k]) + math::abs(d[n - 1 - k]));
        out[k] = -mu;
        out[n - 1 - k] = mu;
    }
    Ok(out)
}

/// Householder vector for `x`: returns `(beta, tau)` and overwrites `x` with
/// `v` (`v[0] = 1`) such that `(I − tau v vᵀ) x = beta e₁`.
fn householder(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let tail = crate::vector::norm2(&x[1..]);
    if tail == 0.0 {
        x[0] = 1.0;
        return (alpha, 0.0);
    }
    let beta = -math::copysign(math::hypot(alpha, tail), alpha);
    let tau = (beta - alpha) / beta;
    let s = 1.0 / (alpha - beta);
    for xi in x[1..].iter_mut() {
        *xi *= s;
    }
    x[0] = 1.0;
    (beta, tau)
}

/// Reduces a symmetric matrix (lower triangle) to tridiagonal form in place.
/// Returns `(diagonal, off_diagonal)` with `off_diagonal.len() == n` and the
/// last entry zero.
fn tridiagonalize_symmetric(a: &mut DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        for i in 0..m {
            v[i] = a[(k + 1 + i, k)];
        }
        let (beta, tau) = householder(&mut v[..m]);
        e[k] = beta;
        if tau == 0.0 {
            continue;
        }
        // p = tau * A22 v, reading the lower triangle of A22 only
        p[..m].iter_mut().for_each(|x| *x = 0.0);
        for i in 0..m {
            let row = &a.data[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + k + 1 + i];
            let vi = v[i];
            let mut s = 0.0;
            for (j, &aij) in row.iter().enumerate() {
                s += aij * v[j];
                p[j] += aij * vi;
            }
            p[i] += s + a[(k + 1 + i, k + 1 + i)] * vi;
        }
        for x in p[..m].iter_mut() {
            *x *= tau;
        }
        // w = p − (tau/2)(pᵀv) v ; A22 −= v wᵀ + w vᵀ
        let c = 0.5 * tau * crate::vector::dot(&p[..m], &v[..m]);
        for i in 0..m {
            p[i] -= c * v[i];
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.data[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + k + 2 + i];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= vi * p[j] + wi * v[j];
            }
        }
    }
    for k in 0..n {
        d[k] = a[(k, k)];
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)];
    }
    (d, e)
}

/// Reduces a skew-symmetric matrix (strict lower triangle) to skew tridiagonal
/// form in place. Returns the subdiagonal (length `n`, last entry zero).
fn tridiagonalize_skew(a: &mut DenseMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut e = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        for i in 0..m {
            v[i] = a[(k + 1 + i, k)];
        }
        let (beta, tau) = householder(&mut v[..m]);
        e[k] = beta;
        if tau == 0.0 {
            continue;
        }
        // p = tau * A22 v with A22[j][i] = −A22[i][j]
        p[..m].iter_mut().for_each(|x| *x = 0.0);
        for i in 0..m {
            let row = &a.data[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + k + 1 + i];
            let vi = v[i];
            let mut s = 0.0;
            for (j, &aij) in row.iter().enumerate() {
                s += aij * v[j];
                p[j] -= aij * vi;
            }
            p[i] += s;
        }
        for x in p[..m].iter_mut() {
            *x *= tau;
        }
        // H A H = A − p vᵀ + v pᵀ  (vᵀAv = 0 for skew A)
        for i in 0..m {
            let (vi, pi) = (v[i], p[i]);
            let row = &mut a.data[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + k + 1 + i];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij += vi * p[j] - pi * v[j];
            }
        }
    }
    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)];
    }
    e
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `d` is the diagonal, `e[i]` couples `i` and `i + 1` (`e[n-1]` unused).
/// Eigenvalues overwrite `d` (unsorted).
pub fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    assert!(e.len() >= n);
    e[n - 1] = 0.0;
    let anorm = d.iter().zip(e.iter()).fold(0.0f64, |m, (a, b)| m.max(math::abs(*a) + math::abs(*b)));
    let floor = f64::EPSILON * f64::EPSILON * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = math::abs(d[m]) + math::abs(d[m + 1]);
                if math::abs(e[m]) <= f64::EPSILON * dd || math::abs(e[m]) <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::NoConvergence(alloc::format!("tridiagonal QL did not converge for eigenvalue {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + math::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues `(re, im)` of a general real matrix: reduction to upper
/// Hessenberg form by stabilized elimination, then the Francis double-shift QR
/// iteration. Complex eigenvalues appear in conjugate pairs.
pub fn general_eigenvalues(a: &DenseMatrix) -> Result<Vec<(f64, f64)>> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based working copy keeps the index arithmetic of the classical algorithm
    let w = n + 1;
    let mut h = vec![0.0; w * w];
    for i in 0..n {
        for j in 0..n {
            h[(i + 1) * w + j + 1] = a[(i, j)];
        }
    }
    let at = |i: usize, j: usize| i * w + j;

    for m in 2..n {
        let mut x = 0.0;
        let mut piv = m;
        for j in m..=n {
            if math::abs(h[at(j, m - 1)]) > math::abs(x) {
                x = h[at(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..=n {
                h.swap(at(piv, j), at(m, j));
            }
            for j in 1..=n {
                h.swap(at(j, piv), at(j, m));
            }
        }
        if x != 0.0 {
            for i in m + 1..=n {
                let mut y = h[at(i, m - 1)];
                if y != 0.0 {
                    y /= x;
                    h[at(i, m - 1)] = y;
                    for j in m..=n {
                        h[at(i, j)] -= y * h[at(m, j)];
                    }
                    for j in 1..=n {
                        h[at(j, m)] += y * h[at(j, i)];
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..i.saturating_sub(1) {
            h[at(i, j)] = 0.0;
        }
    }

    let mut wr = vec![0.0; w];
    let mut wi = vec![0.0; w];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += math::abs(h[at(i, j)]);
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z);
    let mut ww;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = math::abs(h[at(l - 1, l - 1)]) + math::abs(h[at(l, l)]);
                if s == 0.0 {
                    s = anorm;
                }
                if math::abs(h[at(l, l - 1)]) + s == s {
                    h[at(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            x = h[at(nn, nn)];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            y = h[at(nn - 1, nn - 1)];
            ww = h[at(nn, nn - 1)] * h[at(nn - 1, nn)];
            if l == nn - 1 {
                p = 0.5 * (y - x);
                q = p * p + ww;
                z = math::sqrt(math::abs(q));
                x += t;
                if q >= 0.0 {
                    z = p + math::copysign(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = if z != 0.0 { x - ww / z } else { x + z };
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            if its == 60 {
                return Err(Error::NoConvergence(alloc::format!("Hessenberg QR did not converge (active block {nn})")));
            }
            if its % 10 == 0 && its > 0 {
                // exceptional shift
                t += x;
                for i in 1..=nn {
                    h[at(i, i)] -= x;
                }
                let s = math::abs(h[at(nn, nn - 1)]) + math::abs(h[at(nn - 1, nn - 2)]);
                x = 0.75 * s;
                y = x;
                ww = -0.4375 * s * s;
            }
            its += 1;
            let mut m = nn - 2;
            loop {
                z = h[at(m, m)];
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - ww) / h[at(m + 1, m)] + h[at(m, m + 1)];
                q = h[at(m + 1, m + 1)] - z - r0 - s0;
                r = h[at(m + 2, m + 1)];
                let s = math::abs(p) + math::abs(q) + math::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = math::abs(h[at(m, m - 1)]) * (math::abs(q) + math::abs(r));
                let v = math::abs(p) * (math::abs(h[at(m - 1, m - 1)]) + math::abs(z) + math::abs(h[at(m + 1, m + 1)]));
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nn {
                h[at(i, i - 2)] = 0.0;
                if i != m + 2 {
                    h[at(i, i - 3)] = 0.0;
                }
            }
            let mut k = m;
            while k < nn {
                if k != m {
                    p = h[at(k, k - 1)];
                    q = h[at(k + 1, k - 1)];
                    r = if k != nn - 1 { h[at(k + 2, k - 1)] } else { 0.0 };
                    x = math::abs(p) + math::abs(q) + math::abs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = math::copysign(math::sqrt(p * p + q * q + r * r), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            h[at(k, k - 1)] = -h[at(k, k - 1)];
                        }
                    } else {
                        h[at(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        p = h[at(k, j)] + q * h[at(k + 1, j)];
                        if k != nn - 1 {
                            p += r * h[at(k + 2, j)];
                            h[at(k + 2, j)] -= p * z;
                        }
                        h[at(k + 1, j)] -= p * y;
                        h[at(k, j)] -= p * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        p = x * h[at(i, k)] + y * h[at(i, k + 1)];
                        if k != nn - 1 {
                            p += z * h[at(i, k + 2)];
                            h[at(i, k + 2)] -= p * r;
                        }
                        h[at(i, k + 1)] -= p * q;
                        h[at(i, k)] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// Largest eigenvalue modulus of a general real matrix.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64> {
    Ok(general_eigenvalues(a)?.into_iter().fold(0.0, |m, (re, im)| m.max(math::hypot(re, im))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        a
    }

    #[test]
    fn symmetric_eigenvalues_match_nalgebra() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (93, 5)] {
            let a = random_symmetric(n, seed);
            let ours = symmetric_eigenvalues(&a).unwrap();
            let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
            let mut theirs: std::vec::Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(f64::total_cmp);
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-11, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let a = DenseMatrix::from_fn(5, |i, j| if i == j { (5 - i) as f64 } else { 0.0 });
        assert_eq!(symmetric_eigenvalues(&a).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn skew_spectrum_matches_complex_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 5, 30, 61] {
            let mut a = DenseMatrix::zeros(n);
            for i in 0..n {
                for j in 0..i {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    a[(i, j)] = v;
                    a[(j, i)] = -v;
                }
            }
            let ours = skew_symmetric_spectrum(&a).unwrap();
            let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
            let mut theirs: std::vec::Vec<f64> = na.complex_eigenvalues().iter().map(|z| z.im).collect();
            theirs.sort_by(f64::total_cmp);
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
            }
            for k in 0..n {
                assert_eq!(ours[k], -ours[n - 1 - k]);
            }
        }
    }

    #[test]
    fn general_eigenvalues_match_nalgebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1usize, 2, 3, 7, 40, 120] {
            let a = DenseMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let key = |z: &(f64, f64)| (z.0 * 1e6).round() as i64 * 1_000_000_000 + (z.1 * 1e3).round() as i64;
            let mut ours = general_eigenvalues(&a).unwrap();
            let na = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
            let mut theirs: std::vec::Vec<(f64, f64)> = na.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
            ours.sort_by_key(key);
            theirs.sort_by_key(key);
            for (x, y) in ours.iter().zip(&theirs) {
                assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9, "n={n}: {x:?} vs {y:?}");
            }
            let rho = spectral_radius(&a).unwrap();
            let rho_na = theirs.iter().fold(0.0f64, |m, z| m.max(z.0.hypot(z.1)));
            assert!((rho - rho_na).abs() < 1e-9);
        }
    }

    #[test]
    fn lu_solves_and_cholesky_factors() {
        let a = random_symmetric(12, 9).linear_combination(1.0, &DenseMatrix::identity(12), 12.0);
        let x: std::vec::Vec<f64> = (0..12).map(|i| i as f64 - 3.5).collect();
        let b = a.mul_vec(&x);
        let sol = a.lu().unwrap().solve(&b);
        for (s, t) in sol.iter().zip(&x) {
            assert!((s - t).abs() < 1e-12);
        }
        let l = a.cholesky().unwrap();
        let llt = l.matmul(&l.transpose());
        assert!(llt.linear_combination(1.0, &a, -1.0).max_abs() < 1e-12);
        let indefinite = DenseMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(indefinite.cholesky(), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
    }
}
