//! Assembly, mesh and convection-matrix properties on refinement families.

use std::sync::Arc;

use phss_core::assembly::{assemble_diffusion, assemble_laplacian, element_skew_decomposition, l2_error};
use phss_core::cholesky::SparseCholesky;
use phss_core::coefficients::Smoothness;
use phss_core::spectra::{e_norms, lemma_bound_check, lemma_ratio_spread, DEFAULT_DENSE_CAP};
use phss_core::{assemble, AssembledSystem, CoefficientField, QuadratureRule, TriangularMesh};

fn system(field: &CoefficientField, n: usize) -> AssembledSystem {
    let mesh = TriangularMesh::structured_unit_square(n).unwrap();
    assemble(&mesh, field, QuadratureRule::Barycenter).unwrap()
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let field = CoefficientField::manufactured_poisson();
    let mut errors = vec![];
    for n in [8, 16, 32, 64] {
        let mesh = TriangularMesh::structured_unit_square(n).unwrap();
        let sys = assemble(&mesh, &field, QuadratureRule::HighOrder).unwrap();
        let u = SparseCholesky::factor(&sys.theta).unwrap().solve(&sys.load);
        errors.push(l2_error(&mesh, &u, CoefficientField::manufactured_solution).unwrap());
    }
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "observed order {order} from {errors:?}");
    }
}

#[test]
fn l2_error_of_zero_is_the_solution_norm() {
    // ‖sin(πx) sin(πy)‖_{L²} = 1/2
    let mesh = TriangularMesh::structured_unit_square(32).unwrap();
    let e = l2_error(&mesh, &vec![0.0; mesh.num_interior()], CoefficientField::manufactured_solution).unwrap();
    assert!((e - 0.5).abs() < 1e-6, "{e}");
    assert!(l2_error(&mesh, &[0.0], |_, _| 0.0).is_err());
}

#[test]
fn e_norm_bounds_on_structured_family() {
    for name in ["a1", "a2", "a3", "a4"] {
        let field = CoefficientField::builtin(name).unwrap();
        let systems: Vec<_> = [10, 20, 40].map(|n| system(&field, n)).into();
        let refs: Vec<&AssembledSystem> = systems.iter().collect();
        let rows = lemma_bound_check(&refs, DEFAULT_DENSE_CAP).unwrap();
        for r in &rows {
            assert!(r.norm_2 <= r.norm_inf * (1.0 + 1e-12), "{name} n = {}: {} > {}", r.n, r.norm_2, r.norm_inf);
        }
        let spread = lemma_ratio_spread(&rows);
        assert!(spread <= 3.0, "{name}: ‖E‖∞/h² spread {spread}");
    }
    assert!(lemma_bound_check(&[&system(&CoefficientField::laplace(), 4)], DEFAULT_DENSE_CAP).is_err());
}

#[test]
fn e_vanishes_for_divergence_free_convection() {
    let rotation =
        CoefficientField::laplace().with_name("rotation").with_convection(Arc::new(|x, y| [-(y - 0.5), x - 0.5]));
    // the convection integrand is quadratic for linear β, so the rotation
    // field needs the exact rule
    let cases = [
        (CoefficientField::constant("c", 2.0, [3.0, -1.5]), QuadratureRule::Barycenter),
        (rotation, QuadratureRule::HighOrder),
    ];
    for (field, rule) in cases {
        for n in [8, 16] {
            let mesh = TriangularMesh::structured_unit_square(n).unwrap();
            let sys = assemble(&mesh, &field, rule).unwrap();
            let (two, inf) = e_norms(&sys, DEFAULT_DENSE_CAP).unwrap();
            assert!(two <= 1e-14 && inf <= 1e-14, "{}: {two:e} {inf:e}", field.name());
            assert!(sys.skew_part.max_abs() > 0.0);
        }
    }
}

#[test]
fn e_is_the_mass_weighted_divergence() {
    // E_ij = ½ ∫ div β φ_i φ_j with div β = 2 and entries of one sign, so
    // ‖E‖∞ = ∫ φ_i = 1/N² = h²/2 for the diameter h = √2/N
    let sys = system(&CoefficientField::builtin("a1").unwrap(), 10);
    let e = sys.e_matrix();
    let (_, inf) = e_norms(&sys, DEFAULT_DENSE_CAP).unwrap();
    assert!((inf / (sys.h * sys.h) - 0.5).abs() < 1e-12);
    assert!(e.symmetry_defect() == 0.0);
}

#[test]
fn re_plus_skew_recombines_to_the_matrix() {
    for name in ["a1", "a3"] {
        let sys = system(&CoefficientField::builtin(name).unwrap(), 9);
        let back = sys.re_part.add(&sys.skew_part).unwrap();
        assert!(back.linear_combination(1.0, &sys.matrix, -1.0).unwrap().max_abs() < 1e-15);
        assert_eq!(sys.re_part.symmetry_defect(), 0.0);
        let skew_t = sys.skew_part.transpose();
        assert!(skew_t.add(&sys.skew_part).unwrap().max_abs() == 0.0);
        assert_eq!(sys.theta.symmetry_defect(), 0.0);
    }
}

#[test]
fn theta_is_positive_definite_with_zero_row_sums_inside() {
    let mesh = TriangularMesh::structured_unit_square(12).unwrap();
    let theta = assemble_laplacian(&mesh);
    assert!(theta.to_dense().cholesky().is_ok());
    // rows of nodes with no boundary neighbour sum to zero
    for (k, &node) in mesh.interior_nodes().iter().enumerate() {
        let [x, y] = mesh.nodes()[node];
        let h = 1.0 / 12.0;
        if x > 1.5 * h && x < 1.0 - 1.5 * h && y > 1.5 * h && y < 1.0 - 1.5 * h {
            let (_, vals) = theta.row(k);
            assert!(vals.iter().sum::<f64>().abs() < 1e-13);
            // five-point stencil on this triangulation
            assert_eq!(vals.len(), 5);
            assert!((theta.get(k, k) - 4.0).abs() < 1e-13);
        }
    }
}

#[test]
fn quadrature_rules_agree_to_second_order() {
    let field = CoefficientField::builtin("a1").unwrap();
    let mut diffs = vec![];
    for n in [8, 16, 32] {
        let mesh = TriangularMesh::structured_unit_square(n).unwrap();
        let exact = assemble(&mesh, &field, QuadratureRule::HighOrder).unwrap();
        let mid = assemble(&mesh, &field, QuadratureRule::Barycenter).unwrap();
        let d = mid.theta.linear_combination(1.0, &exact.theta, -1.0).unwrap().max_abs();
        diffs.push(d / exact.theta.max_abs());
    }
    for w in diffs.windows(2) {
        assert!(w[0] / w[1] > 3.5, "{diffs:?}");
    }
    // all rules integrate constants exactly
    let mesh = TriangularMesh::structured_unit_square(6).unwrap();
    let reference = assemble_diffusion(&mesh, |_, _| 3.0, QuadratureRule::HighOrder).unwrap();
    for rule in [QuadratureRule::Barycenter, QuadratureRule::Vertex, QuadratureRule::EdgeMidpoint] {
        let t = assemble_diffusion(&mesh, |_, _| 3.0, rule).unwrap();
        assert!(t.linear_combination(1.0, &reference, -1.0).unwrap().max_abs() < 1e-13);
    }
}

#[test]
fn nonpositive_diffusion_names_the_triangle() {
    let mesh = TriangularMesh::structured_unit_square(4).unwrap();
    let field = CoefficientField::laplace()
        .with_diffusion(Arc::new(|x, y| if x > 0.7 && y > 0.7 { -1.0 } else { 1.0 }), Smoothness::Unknown);
    let err = assemble(&mesh, &field, QuadratureRule::Barycenter).unwrap_err();
    assert!(err.to_string().contains("triangle 30"), "{err}");
}

#[test]
fn element_skew_splits_into_three_patterns() {
    let mesh = TriangularMesh::structured_unit_square(5).unwrap();
    let field = CoefficientField::builtin("a2").unwrap();
    for t in [0, 7, mesh.num_triangles() - 1] {
        let s = element_skew_decomposition(&mesh, &field, QuadratureRule::Barycenter, t).unwrap();
        for (r, k) in s.reconstruct().iter().zip(&s.skew) {
            for (a, b) in r.iter().zip(k) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        // |w_r| ≤ 2 h ‖β‖∞ with ‖β‖∞ = √2 for β = [x, y]
        let h = mesh.diameter(t);
        assert!(s.weights.iter().all(|w| w.abs() <= 2.0 * h * std::f64::consts::SQRT_2));
    }
    assert!(element_skew_decomposition(&mesh, &field, QuadratureRule::Barycenter, 10_000).is_err());
}

#[test]
fn refinement_halves_h_and_keeps_the_area() {
    let mut mesh = TriangularMesh::structured_unit_square(3).unwrap();
    for _ in 0..3 {
        let fine = mesh.refine().unwrap();
        assert_eq!(fine.num_triangles(), 4 * mesh.num_triangles());
        assert!((fine.h() - 0.5 * mesh.h()).abs() < 1e-15);
        assert!((fine.total_area() - 1.0).abs() < 1e-13);
        assert!(fine.duplicate_nodes().is_empty());
        mesh = fine;
    }
    // a refined structured mesh is the finer structured mesh, up to numbering
    let direct = TriangularMesh::structured_unit_square(24).unwrap();
    assert_eq!(mesh.num_interior(), direct.num_interior());
}
