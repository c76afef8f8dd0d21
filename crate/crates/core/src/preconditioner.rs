//! The preconditioner `P(a) = D^{1/2} Θ(1) D^{1/2}` with
//! `D = diag(Θ(a)) diag(Θ(1))⁻¹`.
//!
//! `Θ(1)` is factored once with a sparse Cholesky factorization under a
//! nested-dissection ordering; solves with `P` cost two diagonal scalings and
//! two triangular solves.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cholesky::SparseCholesky;
use crate::krylov::{LinearOperator, Preconditioner};
use crate::math;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct PhssPreconditioner {
    theta_unit: CsrMatrix,
    factor: SparseCholesky,
    d_sqrt: Vec<f64>,
}

impl PhssPreconditioner {
    /// Builds `P` from the diffusion matrix `theta_a = Θ(a)` and the Laplacian
    /// stiffness matrix `theta_unit = Θ(1)` on the same mesh.
    pub fn build(theta_a: &CsrMatrix, theta_unit: &CsrMatrix) -> Result<Self> {
        if theta_a.dim() != theta_unit.dim() {
            return Err(Error::DimensionMismatch { expected: theta_unit.dim(), found: theta_a.dim() });
        }
        let da = theta_a.diagonal();
        let d1 = theta_unit.diagonal();
        let mut d_sqrt = Vec::with_capacity(da.len());
        for (i, (&x, &y)) in da.iter().zip(&d1).enumerate() {
            if !(x > 0.0) || !(y > 0.0) || !x.is_finite() || !y.is_finite() {
                return Err(Error::Build(format!("diagonal entry {i} is not positive (Θ(a) = {x}, Θ(1) = {y})")));
            }
            d_sqrt.push(math::sqrt(x / y));
        }
        let factor = SparseCholesky::factor(theta_unit).map_err(|e| match e {
            Error::NotPositiveDefinite { pivot, value } => {
                Error::Build(format!("Θ(1) is not positive definite (pivot {pivot} = {value:e})"))
            }
            other => other,
        })?;
        Ok(Self { theta_unit: theta_unit.clone(), factor, d_sqrt })
    }

    pub fn dim(&self) -> usize {
        self.d_sqrt.len()
    }

    /// Diagonal of `D^{1/2}`.
    pub fn d_sqrt(&self) -> &[f64] {
        &self.d_sqrt
    }

    pub fn theta_unit(&self) -> &CsrMatrix {
        &self.theta_unit
    }

    /// Nonzeros in the Cholesky factor of `Θ(1)`.
    pub fn factor_nnz(&self) -> usize {
        self.factor.nnz()
    }

    /// `y = P x`
    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let scaled: Vec<f64> = x.iter().zip(&self.d_sqrt).map(|(a, d)| a * d).collect();
        self.theta_unit.matvec(&scaled, y);
        for (yi, d) in y.iter_mut().zip(&self.d_sqrt) {
            *yi *= d;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y);
        y
    }

    /// `x = P⁻¹ b`
    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.dim();
        let scaled: Vec<f64> = b.iter().zip(&self.d_sqrt).map(|(a, d)| a / d).collect();
        let mut work = vec![0.0; n];
        self.factor.solve_into(&scaled, x, &mut work);
        for (xi, d) in x.iter_mut().zip(&self.d_sqrt) {
            *xi /= d;
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        self.solve_into(b, &mut x);
        x
    }

    /// `P` as an explicit sparse matrix.
    pub fn to_matrix(&self) -> CsrMatrix {
        self.theta_unit.scale_rows_cols(&self.d_sqrt, &self.d_sqrt)
    }
}

impl LinearOperator for PhssPreconditioner {
    fn dim(&self) -> usize {
        self.d_sqrt.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_into(x, y);
    }
}

impl Preconditioner for PhssPreconditioner {
    fn dim(&self) -> usize {
        self.d_sqrt.len()
    }

    fn solve(&self, r: &[f64], z: &mut [f64]) {
        self.solve_into(r, z);
    }
}
