//! P1 finite-element assembly with homogeneous Dirichlet conditions.
//!
//! For basis functions `φ_i` on interior nodes:
//!
//! * `Θ_ij = ∫ a ∇φ_i · ∇φ_j` (diffusion, symmetric positive definite),
//! * `Ψ_ij = −∫ (∇φ_i · β) φ_j` (convection),
//! * `load_i = ∫ f φ_i`.
//!
//! Each integral is evaluated element by element with the selected
//! [`QuadratureRule`]. The coefficient matrix is `A = Θ + Ψ`, with symmetric
//! part `Re = Θ + E`, `E = (Ψ + Ψᵀ)/2`, and antisymmetric part `S = (Ψ − Ψᵀ)/2`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::coefficients::CoefficientField;
use crate::math;
use crate::mesh::TriangularMesh;
use crate::quadrature::{QuadraturePoint, QuadratureRule};
use crate::sparse::{CsrMatrix, TripletBuilder};
use crate::{Error, Result};

/// Discrete operators on the interior nodes of a mesh.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    /// Diffusion matrix `Θ(a)`.
    pub theta: CsrMatrix,
    /// Convection matrix `Ψ(β)`.
    pub psi: CsrMatrix,
    /// `A = Θ + Ψ`.
    pub matrix: CsrMatrix,
    /// Symmetric part `Θ + E`.
    pub re_part: CsrMatrix,
    /// Antisymmetric part `S`, so that `A = Re + S`.
    pub skew_part: CsrMatrix,
    pub load: Vec<f64>,
    pub rule: QuadratureRule,
    /// Largest triangle diameter.
    pub h: f64,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.theta.dim()
    }

    /// `E = Re − Θ`, the symmetric part of the convection matrix.
    pub fn e_matrix(&self) -> CsrMatrix {
        self.psi.symmetric_part()
    }
}

/// Gradients of the three barycentric basis functions on a triangle with
/// signed area `area`.
pub fn basis_gradients(v: &[[f64; 2]; 3], area: f64) -> [[f64; 2]; 3] {
    let s = 1.0 / (2.0 * area);
    [
        [(v[1][1] - v[2][1]) * s, (v[2][0] - v[1][0]) * s],
        [(v[2][1] - v[0][1]) * s, (v[0][0] - v[2][0]) * s],
        [(v[0][1] - v[1][1]) * s, (v[1][0] - v[0][0]) * s],
    ]
}

fn point(v: &[[f64; 2]; 3], q: &QuadraturePoint) -> (f64, f64) {
    let b = q.bary;
    (b[0] * v[0][0] + b[1] * v[1][0] + b[2] * v[2][0], b[0] * v[0][1] + b[1] * v[1][1] + b[2] * v[2][1])
}

#[inline]
fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn checked_diffusion(coeffs: &CoefficientField, x: f64, y: f64, t: usize) -> Result<f64> {
    let a = coeffs.a(x, y);
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Assembly {
            element: t,
            reason: format!("diffusion coefficient a({x}, {y}) = {a} is not positive and finite"),
        });
    }
    Ok(a)
}

type ElementMatrices = ([[f64; 3]; 3], [[f64; 3]; 3], [f64; 3]);

/// Element matrices `(Θ_K, Ψ_K)` and element load.
fn element_matrices(
    mesh: &TriangularMesh,
    coeffs: &CoefficientField,
    pts: &[QuadraturePoint],
    t: usize,
) -> Result<ElementMatrices> {
    let v = mesh.vertices(t);
    let area = mesh.area(t);
    let g = basis_gradients(&v, area);
    let mut theta = [[0.0; 3]; 3];
    let mut psi = [[0.0; 3]; 3];
    let mut load = [0.0; 3];
    for q in pts {
        let (x, y) = point(&v, q);
        let w = q.weight * area;
        let a = checked_diffusion(coeffs, x, y, t)?;
        let beta = coeffs.beta(x, y);
        let f = coeffs.f(x, y);
        if !beta[0].is_finite() || !beta[1].is_finite() || !f.is_finite() {
            return Err(Error::Assembly { element: t, reason: format!("non-finite convection or load at ({x}, {y})") });
        }
        for i in 0..3 {
            let gb = dot2(g[i], beta);
            load[i] += w * f * q.bary[i];
            for j in 0..3 {
                theta[i][j] += w * a * dot2(g[i], g[j]);
                psi[i][j] -= w * gb * q.bary[j];
            }
        }
    }
    Ok((theta, psi, load))
}

/// Assembles `Θ(a)`, `Ψ(β)` and the load vector on the interior nodes.
///
/// Fails with [`Error::Assembly`] naming the element if `a` is not positive
/// at some quadrature point.
pub fn assemble(mesh: &TriangularMesh, coeffs: &CoefficientField, rule: QuadratureRule) -> Result<AssembledSystem> {
    let n = mesh.num_interior();
    let pts = rule.points();
    let cap = 9 * mesh.num_triangles();
    let mut theta = TripletBuilder::with_capacity(n, cap);
    let mut psi = TripletBuilder::with_capacity(n, cap);
    let mut load = vec![0.0; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let (th, ps, ld) = element_matrices(mesh, coeffs, &pts, t)?;
        let idx = tri.map(|v| mesh.interior_index(v));
        for i in 0..3 {
            let Some(gi) = idx[i] else { continue };
            load[gi] += ld[i];
            for j in 0..3 {
                let Some(gj) = idx[j] else { continue };
                theta.push(gi, gj, th[i][j]);
                psi.push(gi, gj, ps[i][j]);
            }
        }
    }
    let theta = theta.build();
    let psi = psi.build();
    let matrix = theta.add(&psi)?;
    let re_part = matrix.symmetric_part();
    let skew_part = matrix.skew_part();
    Ok(AssembledSystem { theta, psi, matrix, re_part, skew_part, load, rule, h: mesh.h() })
}

/// Diffusion matrix `Θ(a)` alone.
pub fn assemble_diffusion(
    mesh: &TriangularMesh,
    a: impl Fn(f64, f64) -> f64,
    rule: QuadratureRule,
) -> Result<CsrMatrix> {
    let n = mesh.num_interior();
    let pts = rule.points();
    let mut theta = TripletBuilder::with_capacity(n, 9 * mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let v = mesh.vertices(t);
        let area = mesh.area(t);
        let g = basis_gradients(&v, area);
        let mut aw = 0.0;
        for q in &pts {
            let (x, y) = point(&v, q);
            let val = a(x, y);
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::Assembly {
                    element: t,
                    reason: format!("diffusion coefficient a({x}, {y}) = {val} is not positive and finite"),
                });
            }
            aw += q.weight * area * val;
        }
        let idx = tri.map(|v| mesh.interior_index(v));
        for i in 0..3 {
            let Some(gi) = idx[i] else { continue };
            for j in 0..3 {
                let Some(gj) = idx[j] else { continue };
                theta.push(gi, gj, aw * dot2(g[i], g[j]));
            }
        }
    }
    Ok(theta.build())
}

/// `Θ(1)`, the stiffness matrix of the Laplacian.
pub fn assemble_laplacian(mesh: &TriangularMesh) -> CsrMatrix {
    assemble_diffusion(mesh, |_, _| 1.0, QuadratureRule::Barycenter).expect("unit coefficient")
}

/// Antisymmetric part of one element convection matrix, written as
/// `S_K = ½ (w₁ R₁ + w₂ R₂ + w₃ R₃)` over the three elementary antisymmetric
/// patterns coupling vertex pairs (1,2), (2,3) and (1,3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementSkew {
    /// `w = [γ₁₂ − γ₂₁, γ₂₃ − γ₃₂, γ₁₃ − γ₃₁]` with `γ_ij = ∫_K (∇φ_i · β) φ_j`.
    pub weights: [f64; 3],
    /// `(Ψ_K − Ψ_Kᵀ) / 2`.
    pub skew: [[f64; 3]; 3],
}

/// The patterns `R₁`, `R₂`, `R₃` (vertex pairs (1,2), (2,3), (1,3)).
pub const SKEW_PATTERNS: [[[f64; 3]; 3]; 3] = [
    [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    [[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
];

impl ElementSkew {
    /// `½ Σ w_r R_r`
    pub fn reconstruct(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (w, r) in self.weights.iter().zip(&SKEW_PATTERNS) {
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += 0.5 * w * r[i][j];
                }
            }
        }
        out
    }
}

/// Elementary decomposition of the convection skew part on triangle `t`.
pub fn element_skew_decomposition(
    mesh: &TriangularMesh,
    coeffs: &CoefficientField,
    rule: QuadratureRule,
    t: usize,
) -> Result<ElementSkew> {
    if t >= mesh.num_triangles() {
        return Err(Error::InvalidArgument(format!("triangle {t} out of range ({} triangles)", mesh.num_triangles())));
    }
    let (_, psi, _) = element_matrices(mesh, coeffs, &rule.points(), t)?;
    // γ = −Ψ_K
    let gamma = |i: usize, j: usize| -psi[i][j];
    let weights = [gamma(0, 1) - gamma(1, 0), gamma(1, 2) - gamma(2, 1), gamma(0, 2) - gamma(2, 0)];
    let mut skew = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            skew[i][j] = 0.5 * (psi[i][j] - psi[j][i]);
        }
    }
    Ok(ElementSkew { weights, skew })
}

/// `‖u − u_h‖_{L²}` for a discrete solution given on the interior nodes
/// (boundary values zero), integrated with the degree-5 rule.
pub fn l2_error(mesh: &TriangularMesh, u_h: &[f64], exact: impl Fn(f64, f64) -> f64) -> Result<f64> {
    if u_h.len() != mesh.num_interior() {
        return Err(Error::DimensionMismatch { expected: mesh.num_interior(), found: u_h.len() });
    }
    let pts = QuadratureRule::HighOrder.points();
    let mut sum = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let v = mesh.vertices(t);
        let area = mesh.area(t);
        let nodal = tri.map(|n| mesh.interior_index(n).map_or(0.0, |k| u_h[k]));
        for q in &pts {
            let (x, y) = point(&v, q);
            let uh = q.bary[0] * nodal[0] + q.bary[1] * nodal[1] + q.bary[2] * nodal[2];
            let d = exact(x, y) - uh;
            sum += q.weight * area * d * d;
        }
    }
    Ok(math::sqrt(sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interior_node_laplacian() {
        let mesh = TriangularMesh::structured_unit_square(2).unwrap();
        let sys = assemble(&mesh, &CoefficientField::laplace(), QuadratureRule::Barycenter).unwrap();
        assert_eq!(sys.dim(), 1);
        assert!((sys.theta.get(0, 0) - 4.0).abs() < 1e-14);
        assert_eq!(sys.psi.nnz(), 0);
        // six triangles of area 1/8 around the center, each contributing |K|/3
        assert!((sys.load[0] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn laplacian_is_five_point_stencil() {
        let n = 6;
        let mesh = TriangularMesh::structured_unit_square(n).unwrap();
        let theta = assemble_laplacian(&mesh);
        let m = n - 1;
        assert_eq!(theta.dim(), m * m);
        for (i, j, v) in theta.iter() {
            let (xi, yi) = (i % m, i / m);
            let (xj, yj) = (j % m, j / m);
            let d = xi.abs_diff(xj) + yi.abs_diff(yj);
            match d {
                0 => assert!((v - 4.0).abs() < 1e-13),
                1 => assert!((v + 1.0).abs() < 1e-13),
                _ => panic!("unexpected coupling ({i}, {j}) = {v}"),
            }
        }
    }

    #[test]
    fn constant_convection_has_no_symmetric_part() {
        let mesh = TriangularMesh::structured_unit_square(8).unwrap();
        let c = CoefficientField::constant("c", 2.0, [1.5, -0.7]);
        let sys = assemble(&mesh, &c, QuadratureRule::Barycenter).unwrap();
        assert!(sys.e_matrix().max_abs() < 1e-14);
        assert!(sys.skew_part.max_abs() > 1e-3);
    }

    #[test]
    fn nonpositive_diffusion_names_element() {
        let mesh = TriangularMesh::structured_unit_square(4).unwrap();
        let c = CoefficientField::laplace().with_diffusion(
            alloc::sync::Arc::new(|x, y| if x > 0.5 && y > 0.5 { -1.0 } else { 1.0 }),
            crate::coefficients::Smoothness::Unknown,
        );
        match assemble(&mesh, &c, QuadratureRule::Barycenter) {
            Err(Error::Assembly { element, .. }) => {
                let v = mesh.vertices(element);
                let cx = (v[0][0] + v[1][0] + v[2][0]) / 3.0;
                let cy = (v[0][1] + v[1][1] + v[2][1]) / 3.0;
                assert!(cx > 0.5 && cy > 0.5);
            }
            other => panic!("expected assembly error, got {other:?}"),
        }
    }

    #[test]
    fn skew_decomposition_reconstructs_element_skew() {
        let mesh = TriangularMesh::structured_unit_square(5).unwrap();
        let c = CoefficientField::builtin("a1").unwrap();
        for t in 0..mesh.num_triangles() {
            let e = element_skew_decomposition(&mesh, &c, QuadratureRule::EdgeMidpoint, t).unwrap();
            for (r, s) in e.reconstruct().iter().zip(&e.skew) {
                for (a, b) in r.iter().zip(s) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }
}
