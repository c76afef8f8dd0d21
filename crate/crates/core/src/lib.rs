//! Finite-element convection-diffusion operators and the preconditioned
//! Hermitian/skew-Hermitian splitting (PHSS) iteration.
//!
//! The crate is `no_std` and only needs an allocator. Everything that touches
//! files, the command line or text formats lives in the `phss` companion crate.
//!
//! The pipeline is:
//!
//! 1. [`mesh`] builds a P1 triangulation of the unit square (or accepts one).
//! 2. [`assembly`] assembles the stiffness matrix `Θ(a)`, the convection matrix
//!    `Ψ(β)`, their symmetric / antisymmetric parts and the load vector.
//! 3. [`preconditioner`] builds `P(a) = D^{1/2} Θ(1) D^{1/2}` with a cached
//!    sparse Cholesky factor of `Θ(1)`.
//! 4. [`phss`] runs the outer HSS / PHSS / inexact PHSS iteration, using the
//!    [`krylov`] kernels for the two half-steps.
//! 5. [`spectra`] computes the eigenvalues of the preconditioned pencils densely
//!    and counts outliers around the cluster points.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod cholesky;
pub mod coefficients;
pub mod dense;
mod error;
pub mod krylov;
pub(crate) mod math;
pub mod mesh;
pub mod ordering;
pub mod phss;
pub mod preconditioner;
pub mod quadrature;
pub mod sparse;
pub mod spectra;
pub mod vector;

pub use assembly::{assemble, AssembledSystem};
pub use coefficients::CoefficientField;
pub use error::{Error, Result};
pub use krylov::{InnerSolveReport, LinearOperator, Preconditioner};
pub use mesh::TriangularMesh;
pub use phss::{IterationReport, Mode, PhssConfig};
pub use preconditioner::PhssPreconditioner;
pub use quadrature::QuadratureRule;
pub use sparse::CsrMatrix;
pub use spectra::SpectralReport;
