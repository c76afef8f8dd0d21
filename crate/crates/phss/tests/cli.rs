use std::path::Path;
use std::process::Command;

use phss::matrix_market::read_matrix;
use phss::triangle::read_triangle_files;
use phss_core::assembly::assemble;
use phss_core::{CoefficientField, QuadratureRule, TriangularMesh};

fn phss() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phss"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = phss().args(args).env("PHSS_THREADS", "2").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn mesh_gen_refine_convert() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("sq");
    assert_eq!(run(&["mesh", "gen", "-n", "5", "-o", p(&base)]).0, 0);
    let fine = dir.path().join("sq.1");
    assert_eq!(run(&["mesh", "refine", "-i", p(&base), "-o", p(&fine)]).0, 0);
    assert_eq!(
        read_triangle_files(&fine).unwrap(),
        TriangularMesh::structured_unit_square(5).unwrap().refine().unwrap()
    );
    let json = dir.path().join("sq.json");
    assert_eq!(run(&["mesh", "convert", "-i", p(&fine), "-o", p(&json)]).0, 0);
    let back = dir.path().join("back");
    assert_eq!(run(&["mesh", "convert", "-i", p(&json), "-o", p(&back)]).0, 0);
    assert_eq!(read_triangle_files(&back).unwrap(), read_triangle_files(&fine).unwrap());
}

#[test]
fn assemble_exports_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(&["assemble", "-n", "6", "--coeff", "a2", "--out-dir", p(dir.path())]);
    assert_eq!(code, 0);
    assert!(stdout.contains("n = 25") && stdout.contains("outside theory"), "{stdout}");
    let mesh = TriangularMesh::structured_unit_square(6).unwrap();
    let sys = assemble(&mesh, &CoefficientField::builtin("a2").unwrap(), QuadratureRule::Barycenter).unwrap();
    let read = |name: &str| read_matrix(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
    assert_eq!(read("theta.mtx"), sys.theta);
    assert_eq!(read("skew.mtx"), sys.skew_part);
    assert_eq!(read("re.mtx"), sys.re_part);
}

#[test]
fn solve_reports_and_exit_codes() {
    let (code, stdout, _) = run(&["solve", "-n", "10", "--coeff", "a1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("5 outer"), "{stdout}");

    let (code, stdout, _) = run(&["solve", "-n", "10", "--coeff", "a4", "--max-outer", "3"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("NOT CONVERGED"), "{stdout}");

    let (code, stdout, _) = run(&["solve", "-n", "8", "--mode", "hss", "--json", "--coeff", "a=1+x*y;beta=1,0"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["mode"], "HSS");
    assert_eq!(v["converged"], true);

    let (code, _, stderr) = run(&["solve", "-n", "10", "--alpha", "optimal", "--coeff", "a4"]);
    assert_eq!(code, 0);
    assert!(stderr.contains("alpha* ="), "{stderr}");

    let (code, _, stderr) = run(&["solve", "-n", "10", "--coeff", "a9"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("unknown builtin"), "{stderr}");
}

#[test]
fn table_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"mesh":{"structured":{"sizes":[10,20]}},"coefficient":"a2","modes":["PHSS"],"format":"csv"}"#,
    )
    .unwrap();
    let out = dir.path().join("t.csv");
    let (code, _, _) = run(&["table", "--config", p(&cfg), "-o", p(&out)]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("N=10,81,"));
    // identical on rerun
    let out2 = dir.path().join("t2.csv");
    run(&["table", "--config", p(&cfg), "-o", p(&out2)]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&out2).unwrap());

    std::fs::write(&cfg, r#"{"mesh":{"structured":{"sizes":[10]}},"coefficient":"a2","modes":[]}"#).unwrap();
    let (code, _, stderr) = run(&["table", "--config", p(&cfg)]);
    assert_eq!(code, 1);
    assert!(stderr.contains("empty mode list"), "{stderr}");
}

#[test]
fn spectra_and_alpha_study() {
    let (code, stdout, _) = run(&["spectra", "--sizes", "10", "--coeff", "a1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("| 81 | 1.00e+00 | 1.04e+00 | 0 / 0 / 0% | 0 / 3 / 3.7% |"), "{stdout}");

    let (code, _, _) = run(&["spectra", "--sizes", "10,20", "--cap", "100"]);
    assert_eq!(code, 2);

    let (code, stdout, _) =
        run(&["alpha-study", "--sizes", "10", "--coeff", "a4", "--modes", "phss", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["kind"], "alpha");
    let a = v["rows"][0]["estimate"]["alpha_star"].as_f64().unwrap();
    assert!((1.0..=1.2).contains(&a), "{a}");
}
