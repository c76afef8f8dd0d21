//! Dense spectral analysis of the preconditioned pencils `(Re, P)` and
//! `(Im, P)`, with `Im = −i S` Hermitian, and outlier counts around their
//! cluster points.
//!
//! `P` is factored as `Π P Πᵀ = L Lᵀ` with the sparse Cholesky code, and the
//! congruent matrix `L⁻¹ Π X Πᵀ L⁻ᵀ` is formed densely with `2n` sparse
//! triangular solves before a dense symmetric (or skew-symmetric) eigensolve.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::AssembledSystem;
use crate::cholesky::SparseCholesky;
use crate::dense::{self, DenseMatrix};
use crate::math;
use crate::preconditioner::PhssPreconditioner;
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Largest dimension accepted by the dense routines unless overridden.
pub const DEFAULT_DENSE_CAP: usize = 4000;

/// Default outlier radii.
pub const DEFAULT_RADII: [f64; 2] = [0.1, 0.01];

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OutlierCount {
    pub delta: f64,
    /// Eigenvalues below `center − delta`.
    pub below: usize,
    /// Eigenvalues above `center + delta`.
    pub above: usize,
    /// `100 (below + above) / n`.
    pub percent: f64,
}

/// Counts eigenvalues strictly outside the closed interval
/// `[center − delta, center + delta]`.
pub fn count_outliers(eigenvalues: &[f64], center: f64, delta: f64) -> OutlierCount {
    let below = eigenvalues.iter().filter(|&&l| l < center - delta).count();
    let above = eigenvalues.iter().filter(|&&l| l > center + delta).count();
    let n = eigenvalues.len().max(1);
    OutlierCount { delta, below, above, percent: 100.0 * (below + above) as f64 / n as f64 }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PencilSummary {
    pub min: f64,
    pub max: f64,
    pub center: f64,
    pub outliers: Vec<OutlierCount>,
}

impl PencilSummary {
    pub fn new(eigenvalues: &[f64], center: f64, radii: &[f64]) -> Self {
        let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let outliers = radii.iter().map(|&d| count_outliers(eigenvalues, center, d)).collect();
        Self { min, max, center, outliers }
    }
}

/// Spectral summary of both pencils for one problem.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralReport {
    pub n: usize,
    /// `eig(P⁻¹ Re)`, clustered at 1.
    pub re: PencilSummary,
    /// `eig(P⁻¹ Im)`, clustered at 0.
    pub im: PencilSummary,
}

/// Factor of `P` reused for both pencils.
pub struct CongruenceFactor {
    factor: SparseCholesky,
}

impl CongruenceFactor {
    pub fn new(p: &PhssPreconditioner, cap: usize) -> Result<Self> {
        let n = p.dim();
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
        Ok(Self { factor: SparseCholesky::factor(&p.to_matrix())? })
    }

    pub fn dim(&self) -> usize {
        self.factor.dim()
    }

    /// `L⁻¹ Π X Πᵀ L⁻ᵀ` as a dense matrix.
    pub fn congruence(&self, x: &CsrMatrix) -> Result<DenseMatrix> {
        let n = self.dim();
        if x.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.dim() });
        }
        let perm = self.factor.permutation();
        let mut inv = vec![0usize; n];
        for (k, &old) in perm.iter().enumerate() {
            inv[old] = k;
        }
        // rows of (Π X Πᵀ)ᵀ, i.e. columns of Π X Πᵀ
        let mut buf = vec![0.0; n * n];
        for (i, j, v) in x.iter() {
            buf[inv[j] * n + inv[i]] = v;
        }
        // (L⁻¹ X̃)ᵀ row by row, then transpose to L⁻¹ X̃
        for row in buf.chunks_exact_mut(n) {
            self.factor.solve_lower_in_place(row);
        }
        transpose_in_place(&mut buf, n);
        // row j ← L⁻¹ (row j of L⁻¹ X̃)ᵀ gives M L⁻ᵀ with M = L⁻¹ X̃
        for row in buf.chunks_exact_mut(n) {
            self.factor.solve_lower_in_place(row);
        }
        DenseMatrix::from_row_major(n, buf)
    }
}

fn transpose_in_place(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            a.swap(i * n + j, j * n + i);
        }
    }
}

/// Ascending eigenvalues of `P⁻¹ Re`.
pub fn re_pencil_spectrum(re: &CsrMatrix, p: &PhssPreconditioner, cap: usize) -> Result<Vec<f64>> {
    let f = CongruenceFactor::new(p, cap)?;
    dense::symmetric_eigenvalues(&f.congruence(re)?)
}

/// Ascending eigenvalues of `P⁻¹ Im` with `Im = −i S`: the real sequence
/// `{−μ_k, …, μ_k}` where `±i μ_k` are the eigenvalues of `P⁻¹ S`.
pub fn im_pencil_spectrum(skew: &CsrMatrix, p: &PhssPreconditioner, cap: usize) -> Result<Vec<f64>> {
    let f = CongruenceFactor::new(p, cap)?;
    dense::skew_symmetric_spectrum(&f.congruence(skew)?)
}

/// Both spectra and their outlier counts for the given radii.
pub fn analyze(system: &AssembledSystem, p: &PhssPreconditioner, radii: &[f64], cap: usize) -> Result<SpectralReport> {
    let f = CongruenceFactor::new(p, cap)?;
    let re = dense::symmetric_eigenvalues(&f.congruence(&system.re_part)?)?;
    let im = dense::skew_symmetric_spectrum(&f.congruence(&system.skew_part)?)?;
    Ok(SpectralReport {
        n: system.dim(),
        re: PencilSummary::new(&re, 1.0, radii),
        im: PencilSummary::new(&im, 0.0, radii),
    })
}

/// `(‖E‖₂, ‖E‖_∞)` for the symmetric part `E` of the convection matrix.
pub fn e_norms(system: &AssembledSystem, cap: usize) -> Result<(f64, f64)> {
    let e = system.e_matrix();
    let n = e.dim();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    let eig = dense::symmetric_eigenvalues(&e.to_dense())?;
    let two = eig.iter().fold(0.0f64, |m, &l| m.max(math::abs(l)));
    Ok((two, e.norm_inf()))
}

/// Norms of `E` on one mesh of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LemmaRow {
    pub n: usize,
    pub h: f64,
    pub norm_2: f64,
    pub norm_inf: f64,
    /// `‖E‖_∞ / h²`
    pub ratio: f64,
}

/// `‖E‖₂`, `‖E‖_∞` and `‖E‖_∞ / h²` on each system of a refinement family.
///
/// Needs at least three systems. The ratio column should stay bounded as
/// `h → 0`; [`lemma_ratio_spread`] summarizes it.
pub fn lemma_bound_check(systems: &[&AssembledSystem], cap: usize) -> Result<Vec<LemmaRow>> {
    if systems.len() < 3 {
        return Err(Error::InvalidArgument(alloc::format!(
            "the E-norm check needs at least 3 meshes, got {}",
            systems.len()
        )));
    }
    systems
        .iter()
        .map(|s| {
            let (norm_2, norm_inf) = e_norms(s, cap)?;
            Ok(LemmaRow { n: s.dim(), h: s.h, norm_2, norm_inf, ratio: norm_inf / (s.h * s.h) })
        })
        .collect()
}

/// `max ratio / min ratio` over the rows, or 1 when every ratio is zero.
pub fn lemma_ratio_spread(rows: &[LemmaRow]) -> f64 {
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    if hi == 0.0 {
        1.0
    } else {
        hi / lo
    }
}
