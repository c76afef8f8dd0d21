//! Spectral behaviour of the preconditioned pencils across mesh families.

use phss_core::assembly::assemble_laplacian;
use phss_core::spectra::{
    analyze, count_outliers, im_pencil_spectrum, re_pencil_spectrum, SpectralReport, DEFAULT_DENSE_CAP,
};
use phss_core::{assemble, CoefficientField, Error, PhssPreconditioner, QuadratureRule, TriangularMesh};

fn report(name: &str, n: usize) -> SpectralReport {
    let mesh = TriangularMesh::structured_unit_square(n).unwrap();
    let sys = assemble(&mesh, &CoefficientField::builtin(name).unwrap(), QuadratureRule::Barycenter).unwrap();
    let p = PhssPreconditioner::build(&sys.theta, &assemble_laplacian(&mesh)).unwrap();
    analyze(&sys, &p, &[0.1, 0.01], DEFAULT_DENSE_CAP).unwrap()
}

#[test]
fn smallest_mesh_matches_reference_values() {
    let r = report("a1", 10);
    assert_eq!(r.n, 81);
    assert!((0.99..=1.005).contains(&r.re.min), "{}", r.re.min);
    assert!((1.02..=1.06).contains(&r.re.max), "{}", r.re.max);
    let c = r.re.outliers[0];
    assert_eq!((c.below, c.above), (0, 0));
    let c = r.re.outliers[1];
    assert!(c.below <= 2 && c.above.abs_diff(3) <= 2, "{c:?}");
    let c = r.im.outliers[1];
    assert!(c.below.abs_diff(4) <= 2 && c.above.abs_diff(4) <= 2, "{c:?}");
    assert!((r.im.max / 2.68e-2 - 1.0).abs() <= 0.15, "{}", r.im.max);
}

#[test]
fn spectral_equivalence_interval_is_mesh_independent() {
    let reports: Vec<_> = [10, 20, 40].map(|n| report("a1", n)).into();
    let (lo, hi) = (reports[0].re.min, reports[0].re.max);
    for r in &reports[1..] {
        assert!((r.re.min / lo - 1.0).abs() < 0.1 && (r.re.max / hi - 1.0).abs() < 0.1, "{:?}", r.re);
        assert!(r.re.min > 0.0);
    }
}

#[test]
fn imaginary_spectrum_is_symmetric_and_small() {
    let mesh = TriangularMesh::structured_unit_square(12).unwrap();
    for name in ["a1", "a3"] {
        let sys = assemble(&mesh, &CoefficientField::builtin(name).unwrap(), QuadratureRule::Barycenter).unwrap();
        let p = PhssPreconditioner::build(&sys.theta, &assemble_laplacian(&mesh)).unwrap();
        let im = im_pencil_spectrum(&sys.skew_part, &p, DEFAULT_DENSE_CAP).unwrap();
        let n = im.len();
        for k in 0..n {
            assert!((im[k] + im[n - 1 - k]).abs() < 1e-12, "{name}: {} vs {}", im[k], im[n - 1 - k]);
        }
        // odd dimension: one exact zero
        assert!(im[n / 2].abs() < 1e-12);
        assert!(im[n - 1] < 0.1);
        let re = re_pencil_spectrum(&sys.re_part, &p, DEFAULT_DENSE_CAP).unwrap();
        assert!(re.windows(2).all(|w| w[0] <= w[1]) && re[0] > 0.0);
    }
}

#[test]
fn proper_and_weak_clusters_separate() {
    // δ = 0.1: smooth-ish coefficients keep a bounded number of outliers
    // while the jump coefficient loses a growing number
    for name in ["a1", "a2", "a3"] {
        for n in [10, 20, 40] {
            let c = report(name, n).re.outliers[0];
            assert!(c.below + c.above <= 2, "{name} N = {n}: {c:?}");
        }
    }
    let jump: Vec<_> = [10, 20, 40].map(|n| report("a4", n).re.outliers[0]).into();
    let counts: Vec<usize> = jump.iter().map(|c| c.below + c.above).collect();
    assert!(counts[0] >= 16 && counts.windows(2).all(|w| w[1] > w[0]), "{counts:?}");
    // the fraction still vanishes: weak clustering
    let fractions: Vec<f64> = jump.iter().map(|c| c.percent).collect();
    assert!(fractions.windows(2).all(|w| w[1] < w[0]), "{fractions:?}");
}

#[test]
fn outlier_boundaries_are_closed() {
    // 0.75 and 1.25 sit exactly on the interval ends
    let c = count_outliers(&[0.5, 0.75, 1.0, 1.25, 1.5], 1.0, 0.25);
    assert_eq!((c.below, c.above), (1, 1));
    assert!((c.percent - 40.0).abs() < 1e-12);
    assert_eq!(count_outliers(&[], 1.0, 0.1).percent, 0.0);
}

#[test]
fn dense_cap_is_enforced() {
    let mesh = TriangularMesh::structured_unit_square(10).unwrap();
    let sys = assemble(&mesh, &CoefficientField::builtin("a1").unwrap(), QuadratureRule::Barycenter).unwrap();
    let p = PhssPreconditioner::build(&sys.theta, &assemble_laplacian(&mesh)).unwrap();
    let err = analyze(&sys, &p, &[0.1], 80).unwrap_err();
    assert!(matches!(err, Error::TooLarge { n: 81, cap: 80 }), "{err}");
}
