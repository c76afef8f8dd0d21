//! Property-based invariants of meshes, assembly and the Krylov kernels.

use std::sync::Arc;

use phss_core::assembly::{assemble_diffusion, assemble_laplacian};
use phss_core::coefficients::Smoothness;
use phss_core::dense::DenseMatrix;
use phss_core::krylov::{pcg, pgmres, Identity, SolveOptions};
use phss_core::spectra::count_outliers;
use phss_core::{assemble, CoefficientField, PhssPreconditioner, QuadratureRule, TriangularMesh};
use proptest::prelude::*;

fn spd(n: usize, entries: &[f64], shift: f64) -> DenseMatrix {
    let b = DenseMatrix::from_fn(n, |i, j| entries[i * n + j]);
    let mut a = b.transpose().matmul(&b);
    for i in 0..n {
        a.row_mut(i)[i] += shift;
    }
    a
}

fn a_norm_error(a: &DenseMatrix, x: &[f64], exact: &[f64]) -> f64 {
    let e: Vec<f64> = x.iter().zip(exact).map(|(u, v)| u - v).collect();
    let ae = a.mul_vec(&e);
    e.iter().zip(&ae).map(|(u, v)| u * v).sum::<f64>().max(0.0).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn structured_meshes_tile_the_square(n in 2usize..30) {
        let mesh = TriangularMesh::structured_unit_square(n).unwrap();
        prop_assert_eq!(mesh.num_interior(), (n - 1) * (n - 1));
        prop_assert_eq!(mesh.num_triangles(), 2 * n * n);
        for t in 0..mesh.num_triangles() {
            prop_assert!((mesh.area(t) - 0.5 / (n * n) as f64).abs() < 1e-15);
        }
        prop_assert!((mesh.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_preserves_area_and_boundary(n in 2usize..8, times in 1usize..3) {
        let mut mesh = TriangularMesh::structured_unit_square(n).unwrap();
        for _ in 0..times {
            mesh = mesh.refine().unwrap();
        }
        let m = n << times;
        prop_assert!((mesh.total_area() - 1.0).abs() < 1e-12);
        prop_assert_eq!(mesh.num_interior(), (m - 1) * (m - 1));
        for (k, p) in mesh.nodes().iter().enumerate() {
            let on_edge = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
            prop_assert_eq!(mesh.is_boundary(k), on_edge);
        }
    }

    #[test]
    fn assembly_splits_consistently(
        n in 3usize..12,
        c in 0.5f64..3.0,
        bx in -2.0f64..2.0,
        by in -2.0f64..2.0,
    ) {
        let mesh = TriangularMesh::structured_unit_square(n).unwrap();
        let field = CoefficientField::new(
            "random",
            Smoothness::C2,
            Arc::new(move |x, y| c + x * y),
            Arc::new(move |x, y| [bx * y, by + x]),
            Arc::new(|_, _| 1.0),
        );
        let sys = assemble(&mesh, &field, QuadratureRule::Barycenter).unwrap();
        prop_assert_eq!(sys.theta.symmetry_defect(), 0.0);
        let back = sys.re_part.add(&sys.skew_part).unwrap();
        prop_assert!(back.linear_combination(1.0, &sys.matrix, -1.0).unwrap().max_abs() < 1e-14);
        let e = sys.e_matrix();
        prop_assert!(sys.theta.add(&e).unwrap().linear_combination(1.0, &sys.re_part, -1.0).unwrap().max_abs() < 1e-14);
        // β = [b_x y, b_y + x] is divergence free: E vanishes up to quadrature
        prop_assert!(e.max_abs() < 1.0 / (n * n) as f64);
        // f ≡ 1 against nonnegative hat functions
        prop_assert!(sys.load.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn preconditioner_is_spd_for_positive_coefficients(
        n in 3usize..10,
        lo in 0.1f64..1.0,
        jump in 1.0f64..100.0,
    ) {
        let mesh = TriangularMesh::structured_unit_square(n).unwrap();
        let theta = assemble_diffusion(&mesh, move |x, _| if x < 0.5 { lo } else { lo * jump }, QuadratureRule::Barycenter).unwrap();
        let p = PhssPreconditioner::build(&theta, &assemble_laplacian(&mesh)).unwrap();
        prop_assert!(p.d_sqrt().iter().all(|&d| d > 0.0));
        let pd = p.to_matrix();
        prop_assert_eq!(pd.symmetry_defect(), 0.0);
        prop_assert!(pd.to_dense().cholesky().is_ok());
        // diagonal of P equals the diagonal of Θ(a)
        for (u, v) in pd.diagonal().iter().zip(theta.diagonal()) {
            prop_assert!((u - v).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn pcg_error_decreases_in_the_energy_norm(
        entries in prop::collection::vec(-1.0f64..1.0, 400),
        rhs in prop::collection::vec(-1.0f64..1.0, 20),
        shift in 0.5f64..5.0,
    ) {
        let a = spd(20, &entries, shift);
        let exact = a.lu().unwrap().solve(&rhs);
        let mut errors = vec![];
        for k in 0..=20 {
            let mut x = vec![0.0; 20];
            pcg(&a, &Identity(20), &rhs, &mut x, &SolveOptions::relative(0.0).with_max_iter(k));
            errors.push(a_norm_error(&a, &x, &exact));
        }
        let scale = errors[0].max(1e-300);
        for w in errors.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10 * scale, "{:?}", errors);
        }
    }

    #[test]
    fn gmres_residual_history_is_nonincreasing(
        entries in prop::collection::vec(-1.0f64..1.0, 400),
        rhs in prop::collection::vec(-1.0f64..1.0, 20),
        diag in 0.0f64..6.0,
    ) {
        let a = DenseMatrix::from_fn(20, |i, j| entries[i * 20 + j] + if i == j { diag } else { 0.0 });
        let mut x = vec![0.0; 20];
        let rep = pgmres(&a, &Identity(20), &rhs, &mut x, &SolveOptions::relative(1e-10).with_restart(20));
        for w in rep.history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", rep.history);
        }
    }

    #[test]
    fn outlier_counts_are_consistent(
        mut eig in prop::collection::vec(0.0f64..2.0, 1..200),
        d1 in 0.001f64..0.5,
        d2 in 0.001f64..0.5,
    ) {
        eig.sort_by(f64::total_cmp);
        let (small, large) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        let a = count_outliers(&eig, 1.0, small);
        let b = count_outliers(&eig, 1.0, large);
        prop_assert!(a.below >= b.below && a.above >= b.above);
        prop_assert!(a.below + a.above <= eig.len());
        prop_assert!((0.0..=100.0).contains(&a.percent));
        let inside = eig.iter().filter(|&&l| l >= 1.0 - small && l <= 1.0 + small).count();
        prop_assert_eq!(inside + a.below + a.above, eig.len());
    }
}
