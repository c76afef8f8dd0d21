use phss::experiment::{BaseMesh, Tolerances};
use phss::report::Report;
use phss::runner::{run_alpha_study, run_iteration_table, run_outlier_table};
use phss::{AlphaPolicy, CoefficientSpec, ExperimentSpec, MeshSource, OutputFormat};
use phss_core::Mode;

fn spec(coeff: &str, sizes: &[usize]) -> ExperimentSpec {
    ExperimentSpec::new(MeshSource::structured(sizes.to_vec()), CoefficientSpec::builtin(coeff))
}

#[test]
fn a1_outer_count_is_mesh_independent() {
    let t = run_iteration_table(&spec("a1", &[10, 20, 40])).unwrap();
    assert!(t.all_converged());
    assert_eq!(t.tag, None);
    for row in &t.rows {
        assert_eq!(row.results[0].mode, Mode::Phss);
        assert_eq!(row.results[0].outer, 5, "{row:?}");
        assert_eq!(row.results[1].outer, 5, "{row:?}");
    }
    assert_eq!(t.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![81, 361, 1521]);
}

#[test]
fn a3_is_tagged_and_needs_seven_steps() {
    let t = run_iteration_table(&spec("a3", &[10, 20, 40]).with_modes([Mode::Phss])).unwrap();
    assert_eq!(t.tag.as_deref(), Some("outside theory"));
    assert!(t.rows.iter().all(|r| r.results[0].outer == 7));
}

#[test]
fn nonconvergence_is_flagged_per_row() {
    let mut s = spec("a4", &[10, 20]).with_modes([Mode::Phss]);
    s.tolerances = Tolerances { max_outer: 14, ..Tolerances::default() };
    let t = run_iteration_table(&s).unwrap();
    assert!(!t.all_converged());
    assert_eq!(t.rows.len(), 2);
    assert!(t.rows[1].flags[0].contains("not converged"));
    let md = Report::Iterations(t).render(OutputFormat::Markdown).unwrap();
    assert!(md.contains("| 14* |"), "{md}");
}

#[test]
fn output_is_deterministic() {
    let s = spec("a2", &[10, 20]);
    let a = Report::Iterations(run_iteration_table(&s).unwrap());
    let b = Report::Iterations(run_iteration_table(&s).unwrap());
    for f in [OutputFormat::Csv, OutputFormat::Markdown, OutputFormat::Json] {
        assert_eq!(a.render(f).unwrap(), b.render(f).unwrap());
    }
}

#[test]
fn json_round_trips() {
    let reports = [
        Report::Iterations(run_iteration_table(&spec("a1", &[6, 12])).unwrap()),
        Report::Outliers(run_outlier_table(&spec("a4", &[6, 12])).unwrap()),
        Report::Alpha(run_alpha_study(&spec("a2", &[6])).unwrap()),
    ];
    for r in reports {
        let text = r.render(OutputFormat::Json).unwrap();
        assert_eq!(Report::from_json(&text).unwrap(), r);
    }
}

#[test]
fn laplace_pencils_are_trivial() {
    let t = run_outlier_table(&spec("laplace", &[8, 12, 16])).unwrap();
    for row in &t.rows {
        let s = row.spectra.as_ref().unwrap();
        assert!((s.re.min - 1.0).abs() < 1e-12 && (s.re.max - 1.0).abs() < 1e-12);
        assert!(s.im.min.abs() < 1e-14 && s.im.max.abs() < 1e-14);
        assert!(s.re.outliers.iter().chain(&s.im.outliers).all(|c| c.below + c.above == 0));
        assert!(row.e_norm_inf.unwrap() < 1e-14);
    }
}

#[test]
fn outlier_rows_above_the_cap_are_refused() {
    let mut s = spec("a1", &[10, 20]);
    s.dense_cap = 100;
    let t = run_outlier_table(&s).unwrap();
    assert!(t.rows[0].flags.is_empty());
    assert!(t.rows[1].spectra.is_none());
    assert!(t.rows[1].flags[0].contains("refused"), "{:?}", t.rows[1].flags);
    assert!(!t.all_ok());
}

#[test]
fn a4_outliers_grow() {
    let t = run_outlier_table(&spec("a4", &[10, 20])).unwrap();
    let count = |k: usize| {
        let c = &t.rows[k].spectra.as_ref().unwrap().re.outliers[0];
        c.below + c.above
    };
    assert!(count(0) >= 16 && count(1) > count(0));
}

#[test]
fn alpha_study_for_laplace_is_trivial() {
    let t = run_alpha_study(&spec("laplace", &[8, 16]).with_modes([Mode::Phss])).unwrap();
    for row in &t.rows {
        let e = row.estimate.unwrap();
        assert!((e.alpha_star - 1.0).abs() < 1e-10, "{e:?}");
        assert_eq!(row.at_one[0].outer, row.at_star[0].outer);
    }
}

#[test]
fn optimal_alpha_policy_is_applied() {
    let mut s = spec("a4", &[10]).with_modes([Mode::Phss]);
    s.alpha = AlphaPolicy::Optimal { steps: 30 };
    let t = run_iteration_table(&s).unwrap();
    let a = t.rows[0].results[0].alpha;
    assert!(a > 1.0 && a < 1.2, "{a}");
}

#[test]
fn jittered_family_keeps_outer_counts() {
    for (coeff, expected) in [("a1", 5), ("a2", 6), ("a3", 7)] {
        let mut s = spec(coeff, &[]).with_modes([Mode::Phss]);
        s.mesh = MeshSource::Jittered { sizes: vec![10, 20, 40], amplitude: 0.2, seed: 1 };
        let t = run_iteration_table(&s).unwrap();
        for row in &t.rows {
            let outer = row.results[0].outer as i64;
            assert!((outer - expected).abs() <= 1, "{coeff} {}: {outer}", row.label);
        }
    }
}

#[test]
fn refine_chain_matches_structured_sizes() {
    let mut s = spec("a1", &[]).with_modes([Mode::Phss]);
    s.mesh = MeshSource::RefineChain { base: BaseMesh::Structured(5), levels: 2 };
    let t = run_iteration_table(&s).unwrap();
    let u = run_iteration_table(&spec("a1", &[5, 10, 20]).with_modes([Mode::Phss])).unwrap();
    for (a, b) in t.rows.iter().zip(&u.rows) {
        assert_eq!(a.n, b.n);
        assert_eq!(a.results[0].outer, b.results[0].outer);
    }
}

#[test]
fn empty_mode_list_is_a_config_error() {
    let s = spec("a1", &[10]).with_modes([]);
    assert!(matches!(run_iteration_table(&s), Err(phss::HarnessError::Config(_))));
}

#[test]
fn csv_has_one_line_per_row() {
    let r = Report::Outliers(run_outlier_table(&spec("a1", &[6, 8, 10])).unwrap());
    let csv = r.render(OutputFormat::Csv).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(header.len(), first.len());
}
