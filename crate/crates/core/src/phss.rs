//! Outer splitting iterations for `A x = b`, `A = Re + S` with `Re` symmetric
//! positive definite and `S` antisymmetric.
//!
//! Each step solves two shifted systems:
//!
//! ```text
//! (αP + Re) x_{k+½} = (αP − S) x_k + b          (PCG, preconditioner P)
//! (αP + S)  x_{k+1} = (αP − Re) x_{k+½} + b     (GMRES, left preconditioner P)
//! ```
//!
//! with `P = I` for [`Mode::Hss`]. Both inner solves start from the previous
//! iterate. In [`Mode::Phss`] they stop once the inner residual drops below
//! `min(inner_tol, tol) · ‖b‖`; in [`Mode::Iphss`] they stop once the inner
//! residual drops below `max(0.1 η^k, 0.1 tol) · ‖b − A x_k‖`.
//!
//! An outer step in which neither inner solve moves the iterate ends the
//! iteration without convergence: later steps would repeat it exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::AssembledSystem;
use crate::dense::{self, DenseMatrix};
use crate::krylov::{self, LinearOperator, Preconditioner, Shifted, SolveOptions};
use crate::math;
use crate::preconditioner::PhssPreconditioner;
use crate::sparse::CsrMatrix;
use crate::vector::{axpy, dot, norm2, scale};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Mode {
    /// Unpreconditioned splitting (`P = I`).
    Hss,
    /// Preconditioned splitting with accurate inner solves.
    Phss,
    /// Preconditioned splitting with inexact inner solves.
    Iphss,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hss => "HSS",
            Mode::Phss => "PHSS",
            Mode::Iphss => "IPHSS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhssConfig {
    /// Shift `α > 0`.
    pub alpha: f64,
    /// Outer stopping tolerance on `‖b − A x‖ / ‖b‖`.
    pub tol: f64,
    pub max_outer: usize,
    /// Forcing-term base for the inexact variant.
    pub eta: f64,
    /// Accurate inner solves stop at a residual of `min(inner_tol, tol) · ‖b‖`.
    pub inner_tol: f64,
    /// Inner iteration cap; defaults to the system dimension.
    pub inner_max_iter: Option<usize>,
    /// GMRES restart length.
    pub restart: Option<usize>,
}

impl Default for PhssConfig {
    fn default() -> Self {
        Self { alpha: 1.0, tol: 1e-7, max_outer: 1000, eta: 0.9, inner_tol: 1e-7, inner_max_iter: None, restart: None }
    }
}

impl PhssConfig {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.alpha) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !positive(self.tol) || !positive(self.inner_tol) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidArgument(format!("eta must lie in (0, 1), got {}", self.eta)));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidArgument("max_outer must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationReport {
    pub mode: Mode,
    pub alpha: f64,
    pub outer_iterations: usize,
    /// PCG iterations of each first half-step.
    pub cg_iterations: Vec<usize>,
    /// GMRES iterations of each second half-step.
    pub gmres_iterations: Vec<usize>,
    /// `‖b − A x_k‖ / ‖b‖` for `k = 0, 1, …`.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub final_relative_residual: f64,
    /// Inner solves that stopped without meeting their target.
    pub inner_failures: usize,
}

impl IterationReport {
    pub fn total_cg(&self) -> usize {
        self.cg_iterations.iter().sum()
    }

    pub fn total_gmres(&self) -> usize {
        self.gmres_iterations.iter().sum()
    }

    pub fn avg_cg(&self) -> f64 {
        average(self.total_cg(), self.outer_iterations)
    }

    pub fn avg_gmres(&self) -> f64 {
        average(self.total_gmres(), self.outer_iterations)
    }

    /// `"avg (total)"` with the average rounded to one decimal.
    pub fn cg_cell(&self) -> String {
        format!("{:.1} ({})", self.avg_cg(), self.total_cg())
    }

    pub fn gmres_cell(&self) -> String {
        format!("{:.1} ({})", self.avg_gmres(), self.total_gmres())
    }
}

fn average(total: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub report: IterationReport,
}

/// `P = I` seen both as operator and as preconditioner.
struct Unit(usize);

impl LinearOperator for Unit {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

impl Preconditioner for Unit {
    fn dim(&self) -> usize {
        self.0
    }

    fn solve(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Runs the splitting iteration on `(Re + S) x = b` from `x₀ = 0`.
///
/// `p` is required for [`Mode::Phss`] and [`Mode::Iphss`] and ignored for
/// [`Mode::Hss`].
pub fn solve(
    mode: Mode,
    re: &CsrMatrix,
    skew: &CsrMatrix,
    p: Option<&PhssPreconditioner>,
    b: &[f64],
    config: &PhssConfig,
) -> Result<Solution> {
    config.validate()?;
    let n = re.dim();
    for found in [skew.dim(), b.len()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    match (mode, p) {
        (Mode::Hss, _) => Ok(run(mode, re, skew, &Unit(n), b, config)),
        (_, Some(p)) => {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
            }
            Ok(run(mode, re, skew, p, b, config))
        }
        (_, None) => Err(Error::InvalidArgument(format!("{} needs a preconditioner", mode.name()))),
    }
}

pub fn phss_solve(system: &AssembledSystem, p: &PhssPreconditioner, config: &PhssConfig) -> Result<Solution> {
    solve(Mode::Phss, &system.re_part, &system.skew_part, Some(p), &system.load, config)
}

pub fn iphss_solve(system: &AssembledSystem, p: &PhssPreconditioner, config: &PhssConfig) -> Result<Solution> {
    solve(Mode::Iphss, &system.re_part, &system.skew_part, Some(p), &system.load, config)
}

pub fn hss_solve(system: &AssembledSystem, config: &PhssConfig) -> Result<Solution> {
    solve(Mode::Hss, &system.re_part, &system.skew_part, None, &system.load, config)
}

fn run<P>(mode: Mode, re: &CsrMatrix, skew: &CsrMatrix, p: &P, b: &[f64], config: &PhssConfig) -> Solution
where
    P: LinearOperator + Preconditioner,
{
    let n = re.dim();
    let alpha = config.alpha;
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    let mut report = IterationReport {
        mode,
        alpha,
        outer_iterations: 0,
        cg_iterations: Vec::new(),
        gmres_iterations: Vec::new(),
        residual_history: vec![if b_norm > 0.0 { 1.0 } else { 0.0 }],
        converged: b_norm == 0.0,
        final_relative_residual: 0.0,
        inner_failures: 0,
    };
    if b_norm == 0.0 {
        return Solution { x, report };
    }

    let first = Shifted { alpha, p, sign: 1.0, m: re };
    let second = Shifted { alpha, p, sign: 1.0, m: skew };
    let mut r_norm = b_norm;
    let mut rhs = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut x_half = vec![0.0; n];

    for k in 0..config.max_outer {
        let inner = || {
            let opts = match mode {
                Mode::Iphss => {
                    let factor = (0.1 * math::pow(config.eta, k as f64)).max(0.1 * config.tol);
                    SolveOptions::absolute(factor * r_norm)
                }
                _ => SolveOptions::absolute(config.inner_tol.min(config.tol) * b_norm),
            };
            SolveOptions { max_iter: config.inner_max_iter, restart: config.restart, ..opts }
        };

        // (αP + Re) x½ = (αP − S) x + b
        p.apply(&x, &mut rhs);
        scale(alpha, &mut rhs);
        skew.matvec(&x, &mut t);
        axpy(-1.0, &t, &mut rhs);
        axpy(1.0, b, &mut rhs);
        x_half.copy_from_slice(&x);
        let rep1 = krylov::pcg(&first, p, &rhs, &mut x_half, &inner());

        // (αP + S) x = (αP − Re) x½ + b
        p.apply(&x_half, &mut rhs);
        scale(alpha, &mut rhs);
        re.matvec(&x_half, &mut t);
        axpy(-1.0, &t, &mut rhs);
        axpy(1.0, b, &mut rhs);
        x.copy_from_slice(&x_half);
        let rep2 = krylov::pgmres(&second, p, &rhs, &mut x, &inner());

        report.cg_iterations.push(rep1.iterations);
        report.gmres_iterations.push(rep2.iterations);
        report.inner_failures += usize::from(!rep1.converged) + usize::from(!rep2.converged);
        report.outer_iterations += 1;

        re.matvec(&x, &mut r);
        skew.matvec(&x, &mut t);
        for ((ri, ti), bi) in r.iter_mut().zip(&t).zip(b) {
            *ri = bi - *ri - ti;
        }
        r_norm = norm2(&r);
        let rel = r_norm / b_norm;
        report.residual_history.push(rel);
        if rel <= config.tol {
            report.converged = true;
            break;
        }
        if !rel.is_finite() || (rep1.iterations == 0 && rep2.iterations == 0) {
            break;
        }
    }
    report.final_relative_residual = r_norm / b_norm;
    Solution { x, report }
}

/// Extreme eigenvalues of `P⁻¹ Re` and the shift that minimizes the
/// contraction bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlphaEstimate {
    /// `√(λ_min λ_max)`
    pub alpha_star: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_max / λ_min`
    pub kappa: f64,
    /// `(√κ − 1)/(√κ + 1)`
    pub sigma_star: f64,
    /// Lanczos steps taken.
    pub steps: usize,
    /// The Lanczos estimate was unusable and power iterations were used.
    pub fell_back: bool,
}

impl AlphaEstimate {
    fn from_extremes(lambda_min: f64, lambda_max: f64, steps: usize, fell_back: bool) -> Self {
        let kappa = lambda_max / lambda_min;
        let sk = math::sqrt(kappa);
        Self {
            alpha_star: math::sqrt(lambda_min * lambda_max),
            lambda_min,
            lambda_max,
            kappa,
            sigma_star: (sk - 1.0) / (sk + 1.0),
            steps,
            fell_back,
        }
    }
}

/// `σ(α) = max_λ |α − λ| / (α + λ)` over the given eigenvalues of `P⁻¹ Re`.
pub fn contraction_bound(alpha: f64, eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().map(|&l| math::abs(alpha - l) / (alpha + l)).fold(0.0, f64::max)
}

/// Deterministic, roughly uniform start vector.
fn start_vector(n: usize) -> Vec<f64> {
    let mut state: u64 = 0x2545_F491_4F6C_DD1D;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 + 0.5
        })
        .collect()
}

/// Estimates `λ_min`, `λ_max` of the pencil `(Re, P)` with `steps` Lanczos
/// steps in the `P`-inner product (full reorthogonalization), falling back to
/// power and inverse power iteration if the Ritz values are not positive.
pub fn optimal_alpha(re: &CsrMatrix, p: &PhssPreconditioner, steps: usize) -> Result<AlphaEstimate> {
    let n = re.dim();
    if p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty system".into()));
    }
    match lanczos_extremes(re, p, steps.clamp(1, n)) {
        Some((lo, hi, k)) if lo > 0.0 && hi.is_finite() => Ok(AlphaEstimate::from_extremes(lo, hi, k, false)),
        _ => {
            let (lo, hi) = power_extremes(re, p, 4 * steps.max(10))?;
            Ok(AlphaEstimate::from_extremes(lo, hi, 0, true))
        }
    }
}

fn lanczos_extremes(re: &CsrMatrix, p: &PhssPreconditioner, steps: usize) -> Option<(f64, f64, usize)> {
    let n = re.dim();
    let mut q = start_vector(n);
    let mut pq = p.apply(&q);
    let nrm = math::sqrt(dot(&q, &pq));
    scale(1.0 / nrm, &mut q);
    scale(1.0 / nrm, &mut pq);
    // basis vectors q_i and their images P q_i
    let mut qs: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut pqs: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut diag = Vec::with_capacity(steps);
    let mut off = Vec::with_capacity(steps);
    let mut u = vec![0.0; n];
    let mut w = vec![0.0; n];
    for j in 0..steps {
        re.matvec(&q, &mut u);
        diag.push(dot(&q, &u));
        p.solve_into(&u, &mut w);
        qs.push(q.clone());
        pqs.push(pq.clone());
        for _pass in 0..2 {
            for (qi, pqi) in qs.iter().zip(&pqs) {
                let c = dot(&w, pqi);
                axpy(-c, qi, &mut w);
            }
        }
        if j + 1 == steps {
            break;
        }
        let pw = p.apply(&w);
        let beta = math::sqrt(dot(&w, &pw).max(0.0));
        if !(beta > 1e-12 * diag[j].abs().max(1e-300)) {
            break;
        }
        off.push(beta);
        q = w.iter().map(|v| v / beta).collect();
        pq = pw.iter().map(|v| v / beta).collect();
    }
    let k = diag.len();
    let mut d = diag;
    let mut e = off;
    e.resize(k, 0.0);
    dense::tridiagonal_eigenvalues(&mut d, &mut e).ok()?;
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((lo, hi, k))
}

fn power_extremes(re: &CsrMatrix, p: &PhssPreconditioner, iters: usize) -> Result<(f64, f64)> {
    let n = re.dim();
    let rayleigh = |v: &[f64]| {
        let num = dot(v, &re.mul_vec(v));
        let den = dot(v, &p.apply(v));
        num / den
    };
    // largest: v ← P⁻¹ Re v
    let mut v = start_vector(n);
    for _ in 0..iters {
        let mut w = p.solve(&re.mul_vec(&v));
        let s = norm2(&w);
        scale(1.0 / s, &mut w);
        v = w;
    }
    let hi = rayleigh(&v);
    // smallest: v ← Re⁻¹ P v, with Re solved by PCG preconditioned by P
    let mut v = start_vector(n);
    for _ in 0..iters {
        let rhs = p.apply(&v);
        let mut w = vec![0.0; n];
        let rep = krylov::pcg(re, p, &rhs, &mut w, &SolveOptions::relative(1e-12));
        if rep.breakdown {
            return Err(Error::NoConvergence("Re is not positive definite".into()));
        }
        let s = norm2(&w);
        scale(1.0 / s, &mut w);
        v = w;
    }
    let lo = rayleigh(&v);
    if !(lo > 0.0) || !hi.is_finite() {
        return Err(Error::NoConvergence(format!("power iterations gave λ_min = {lo}, λ_max = {hi}")));
    }
    Ok((lo, hi))
}

/// Dense iteration matrix
/// `M(α) = (αI + P⁻¹S)⁻¹ (αI − P⁻¹Re) (αI + P⁻¹Re)⁻¹ (αI − P⁻¹S)`.
pub fn iteration_matrix(re: &DenseMatrix, skew: &DenseMatrix, p: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
    let n = re.dim();
    let p_lu = p.lu()?;
    let pr = p_lu.solve_matrix(re);
    let ps = p_lu.solve_matrix(skew);
    let id = DenseMatrix::identity(n);
    let plus_re = id.linear_combination(alpha, &pr, 1.0);
    let minus_re = id.linear_combination(alpha, &pr, -1.0);
    let plus_s = id.linear_combination(alpha, &ps, 1.0);
    let minus_s = id.linear_combination(alpha, &ps, -1.0);
    let inner = plus_re.lu()?.solve_matrix(&minus_s);
    let middle = minus_re.matmul(&inner);
    Ok(plus_s.lu()?.solve_matrix(&middle))
}

/// Spectral radius of [`iteration_matrix`].
pub fn iteration_spectral_radius(re: &DenseMatrix, skew: &DenseMatrix, p: &DenseMatrix, alpha: f64) -> Result<f64> {
    dense::spectral_radius(&iteration_matrix(re, skew, p, alpha)?)
}
