//! Preconditioned conjugate gradients and left-preconditioned restarted GMRES.
//!
//! Both solvers update `x` in place from the supplied initial guess and stop on
//! the 2-norm of the true residual `b − A x`.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::math;
use crate::sparse::CsrMatrix;
use crate::vector::{axpy, dot, norm2};

pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub trait Preconditioner {
    fn dim(&self) -> usize;
    /// `z = M⁻¹ r`
    fn solve(&self, r: &[f64], z: &mut [f64]);
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        CsrMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        DenseMatrix::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

/// `M = I`.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl Preconditioner for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn solve(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// `y = alpha P x + sign M x`, the shifted operators of the splitting iteration.
pub struct Shifted<'a, P: ?Sized, M: ?Sized> {
    pub alpha: f64,
    pub p: &'a P,
    pub sign: f64,
    pub m: &'a M,
}

impl<P: LinearOperator + ?Sized, M: LinearOperator + ?Sized> LinearOperator for Shifted<'_, P, M> {
    fn dim(&self) -> usize {
        self.p.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; x.len()];
        self.p.apply(x, y);
        self.m.apply(x, &mut t);
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi = self.alpha * *yi + self.sign * ti;
        }
    }
}

/// Residual target for an inner solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `‖b − A x‖ ≤ tol · ‖b‖`
    Relative(f64),
    /// `‖b − A x‖ ≤ tol`
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tolerance: Tolerance,
    /// Defaults to the system dimension.
    pub max_iter: Option<usize>,
    /// GMRES restart length; defaults to `min(max_iter, 50)`.
    pub restart: Option<usize>,
}

impl SolveOptions {
    pub fn relative(tol: f64) -> Self {
        Self { tolerance: Tolerance::Relative(tol), max_iter: None, restart: None }
    }

    pub fn absolute(tol: f64) -> Self {
        Self { tolerance: Tolerance::Absolute(tol), max_iter: None, restart: None }
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = Some(max_iter);
        self
    }

    pub fn with_restart(mut self, restart: usize) -> Self {
        self.restart = Some(restart);
        self
    }

    fn target(&self, b_norm: f64) -> f64 {
        match self.tolerance {
            Tolerance::Relative(t) => t * b_norm,
            Tolerance::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolveReport {
    pub iterations: usize,
    /// `‖b − A x‖` at exit.
    pub residual_norm: f64,
    /// `‖b − A x‖ / ‖b‖` at exit (the absolute norm when `b = 0`).
    pub relative_residual: f64,
    pub converged: bool,
    /// The iteration stopped on a zero or negative curvature / Arnoldi
    /// breakdown without reaching the target.
    pub breakdown: bool,
    /// Residual norm after each iteration, starting with the initial one.
    /// PCG records `‖r‖`; GMRES records the preconditioned residual `‖M⁻¹ r‖`
    /// of its least-squares problem.
    pub history: Vec<f64>,
}

fn residual(a: &(impl LinearOperator + ?Sized), b: &[f64], x: &[f64], r: &mut [f64]) {
    a.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

fn check_dims(a: usize, m: usize, b: usize, x: usize) {
    assert!(a == m && a == b && a == x, "dimension mismatch: operator {a}, preconditioner {m}, rhs {b}, x {x}");
}

/// Preconditioned conjugate gradients for symmetric positive definite `a`
/// with a symmetric positive definite preconditioner.
pub fn pcg(
    a: &(impl LinearOperator + ?Sized),
    m: &(impl Preconditioner + ?Sized),
    b: &[f64],
    x: &mut [f64],
    opts: &SolveOptions,
) -> InnerSolveReport {
    let n = a.dim();
    check_dims(n, m.dim(), b.len(), x.len());
    let b_norm = norm2(b);
    let target = opts.target(b_norm);
    let max_iter = opts.max_iter.unwrap_or(n.max(1));
    let rel = |r: f64| if b_norm > 0.0 { r / b_norm } else { r };

    let mut r = vec![0.0; n];
    residual(a, b, x, &mut r);
    let mut r_norm = norm2(&r);
    let mut history = vec![r_norm];
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut iterations = 0;
    let mut breakdown = false;
    if r_norm > target {
        m.solve(&r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        while iterations < max_iter {
            a.apply(&p, &mut q);
            let pq = dot(&p, &q);
            if !(pq > 0.0) || !(rz > 0.0) {
                breakdown = true;
                break;
            }
            let step = rz / pq;
            axpy(step, &p, x);
            axpy(-step, &q, &mut r);
            iterations += 1;
            r_norm = norm2(&r);
            history.push(r_norm);
            if r_norm <= target {
                break;
            }
            m.solve(&r, &mut z);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for (pi, zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
    }
    InnerSolveReport {
        iterations,
        residual_norm: r_norm,
        relative_residual: rel(r_norm),
        converged: r_norm <= target,
        breakdown: breakdown && r_norm > target,
        history,
    }
}

/// Back substitution for the leading `k × k` block of the Hessenberg
/// least-squares problem (already rotated to upper triangular form).
fn triangular_solve(h: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    y
}

/// Left-preconditioned restarted GMRES. Arnoldi uses classical Gram–Schmidt
/// with one full reorthogonalization pass; the true residual is evaluated after
/// every iteration and drives the stopping test.
pub fn pgmres(
    a: &(impl LinearOperator + ?Sized),
    m: &(impl Preconditioner + ?Sized),
    b: &[f64],
    x: &mut [f64],
    opts: &SolveOptions,
) -> InnerSolveReport {
    let n = a.dim();
    check_dims(n, m.dim(), b.len(), x.len());
    let b_norm = norm2(b);
    let target = opts.target(b_norm);
    let max_iter = opts.max_iter.unwrap_or(n.max(1));
    let restart = opts.restart.unwrap_or(max_iter.min(50)).max(1);
    let rel = |r: f64| if b_norm > 0.0 { r / b_norm } else { r };

    let mut r = vec![0.0; n];
    residual(a, b, x, &mut r);
    let mut r_norm = norm2(&r);
    let mut iterations = 0;
    let mut breakdown = false;
    let mut history = Vec::new();
    let mut w = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut xt = x.to_vec();

    'outer: while r_norm > target && iterations < max_iter {
        let mut z = vec![0.0; n];
        m.solve(&r, &mut z);
        let beta = norm2(&z);
        if history.is_empty() {
            history.push(beta);
        }
        if !(beta > 0.0) {
            breakdown = true;
            break;
        }
        vector_scale_into(1.0 / beta, &z, &mut w);
        let mut basis: Vec<Vec<f64>> = vec![w.clone()];
        // columns of the rotated Hessenberg matrix: h[j][i] = R_{ij}
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<(f64, f64)> = Vec::new();
        let mut g = vec![beta];
        for j in 0..restart {
            a.apply(&basis[j], &mut t);
            m.solve(&t, &mut w);
            let mut col = vec![0.0; j + 2];
            for _pass in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let c = dot(v, &w);
                    col[i] += c;
                    axpy(-c, v, &mut w);
                }
            }
            let h_next = norm2(&w);
            col[j + 1] = h_next;
            for (i, &(c, s)) in cs.iter().enumerate() {
                let (u, v) = (col[i], col[i + 1]);
                col[i] = c * u + s * v;
                col[i + 1] = -s * u + c * v;
            }
            let rho = math::hypot(col[j], col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            col[j] = rho;
            col[j + 1] = 0.0;
            cs.push((c, s));
            let gj = g[j];
            g[j] = c * gj;
            g.push(-s * gj);
            h.push(col);
            iterations += 1;
            history.push(math::abs(g[j + 1]));

            let y = triangular_solve(&h, &g, j + 1);
            xt.copy_from_slice(x);
            for (v, yi) in basis.iter().zip(&y) {
                axpy(*yi, v, &mut xt);
            }
            residual(a, b, &xt, &mut r);
            r_norm = norm2(&r);
            let lucky = h_next <= 1e-14 * beta;
            if r_norm <= target || iterations >= max_iter || lucky {
                x.copy_from_slice(&xt);
                if lucky && r_norm > target {
                    breakdown = true;
                }
                break 'outer;
            }
            let mut v = w.clone();
            vector_scale_in_place(1.0 / h_next, &mut v);
            basis.push(v);
        }
        x.copy_from_slice(&xt);
    }
    InnerSolveReport {
        iterations,
        residual_norm: r_norm,
        relative_residual: rel(r_norm),
        converged: r_norm <= target,
        breakdown,
        history,
    }
}

fn vector_scale_into(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = alpha * xi;
    }
}

fn vector_scale_in_place(alpha: f64, x: &mut [f64]) {
    crate::vector::scale(alpha, x);
}
