use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use phss::experiment::{read_mesh_file, theory_tag, AlphaPolicy, LabeledMesh, Tolerances};
use phss::report::Report;
use phss::runner::{self, Instance};
use phss::{generate, matrix_market, mesh_json, triangle};
use phss::{CoefficientSpec, ExperimentSpec, MeshSource, OutputFormat};
use phss_core::phss as solver;
use phss_core::{Mode, QuadratureRule, TriangularMesh};

/// Exit code when a requested run did not converge or a row was refused.
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(name = "phss", version, about = "Preconditioned HSS solver for P1 convection-diffusion problems")]
struct Cli {
    /// Worker threads for table runs (default: all cores).
    #[arg(long, global = true, env = "PHSS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the system on one mesh and export the matrices as MatrixMarket.
    Assemble {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Directory for theta.mtx, psi.mtx, re.mtx, skew.mtx, precond.mtx, load.mtx.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Solve on one mesh and print the iteration report.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value = "phss", value_parser = parse_mode)]
        mode: Mode,
        /// A positive number, or `optimal` for the Lanczos estimate of α*.
        #[arg(long, default_value = "1")]
        alpha: String,
        #[command(flatten)]
        tol: TolArgs,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// Write the solution (interior nodes) as a MatrixMarket vector.
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Outlier table of the preconditioned pencils.
    Spectra {
        #[command(flatten)]
        table: TableArgs,
        /// Outlier radii.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01")]
        radii: Vec<f64>,
        /// Largest dimension for dense analysis.
        #[arg(long, default_value_t = phss_core::spectra::DEFAULT_DENSE_CAP)]
        cap: usize,
    },
    /// Iteration-count table.
    Table {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, default_value = "1")]
        alpha: String,
    },
    /// Estimated α* and iteration counts at α = 1 and α = α*.
    AlphaStudy {
        #[command(flatten)]
        table: TableArgs,
        /// Lanczos steps for the estimate.
        #[arg(long, default_value_t = 40)]
        steps: usize,
    },
    /// Mesh generation and conversion.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Structured (optionally jittered) unit-square mesh.
    Gen {
        #[arg(short = 'n', long)]
        n: usize,
        /// Interior node jitter as a fraction of the spacing.
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output base name (`.node`/`.ele`) or a `.json` path.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Uniform midpoint refinement.
    Refine {
        /// Input Triangle base name or `.json` file.
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Convert between Triangle files and the JSON dump.
    Convert {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct ProblemArgs {
    /// Structured mesh with N cells per side.
    #[arg(short = 'n', long, conflicts_with = "mesh")]
    n: Option<usize>,
    /// Triangle base name or `.json` mesh file.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Builtin name (a1..a4, laplace, manufactured) or `a=<expr>[;beta=<bx>,<by>][;f=<expr>]`.
    #[arg(long, default_value = "a1")]
    coeff: String,
    #[arg(long, default_value = "barycenter", value_parser = parse_rule)]
    quadrature: QuadratureRule,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, default_value_t = Tolerances::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = Tolerances::default().inner_tol)]
    inner_tol: f64,
    #[arg(long, default_value_t = Tolerances::default().eta)]
    eta: f64,
    #[arg(long, default_value_t = Tolerances::default().max_outer)]
    max_outer: usize,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances { tol: self.tol, inner_tol: self.inner_tol, eta: self.eta, max_outer: self.max_outer }
    }
}

#[derive(Args)]
struct TableArgs {
    /// JSON experiment file; other mesh/coefficient flags are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Structured sizes.
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    sizes: Vec<usize>,
    /// Jitter the structured meshes by this fraction of the spacing.
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mesh files instead of structured sizes.
    #[arg(long, value_delimiter = ',')]
    meshes: Vec<PathBuf>,
    #[arg(long, default_value = "a1")]
    coeff: String,
    #[arg(long, value_delimiter = ',', default_value = "phss,iphss", value_parser = parse_mode)]
    modes: Vec<Mode>,
    #[arg(long, default_value = "barycenter", value_parser = parse_rule)]
    quadrature: QuadratureRule,
    #[command(flatten)]
    tol: TolArgs,
    /// csv, markdown or json (overrides the config file).
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Write the table to a file instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s.to_ascii_lowercase().as_str() {
        "hss" => Ok(Mode::Hss),
        "phss" => Ok(Mode::Phss),
        "iphss" => Ok(Mode::Iphss),
        _ => Err(format!("unknown mode `{s}` (expected hss, phss or iphss)")),
    }
}

fn parse_rule(s: &str) -> Result<QuadratureRule, String> {
    QuadratureRule::from_name(s)
        .ok_or_else(|| format!("unknown quadrature `{s}` (expected barycenter, vertex, edge-midpoint or high-order)"))
}

fn parse_alpha(s: &str, steps: usize) -> Result<AlphaPolicy> {
    if s.eq_ignore_ascii_case("optimal") {
        return Ok(AlphaPolicy::Optimal { steps });
    }
    let a: f64 = s.parse().with_context(|| format!("alpha must be a number or `optimal`, got `{s}`"))?;
    Ok(AlphaPolicy::Fixed(a))
}

impl TableArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::from_file(path)?,
            None => {
                let mesh = if !self.meshes.is_empty() {
                    MeshSource::Files { paths: self.meshes.clone() }
                } else if let Some(amplitude) = self.jitter {
                    MeshSource::Jittered { sizes: self.sizes.clone(), amplitude, seed: self.seed }
                } else {
                    MeshSource::structured(self.sizes.clone())
                };
                let mut spec =
                    ExperimentSpec::new(mesh, CoefficientSpec::from_cli(&self.coeff)?).with_modes(self.modes.clone());
                spec.quadrature = self.quadrature;
                spec.tolerances = self.tol.tolerances();
                spec
            }
        };
        if let Some(f) = self.format {
            spec.format = f;
        }
        Ok(spec)
    }

    fn emit(&self, report: &Report, format: OutputFormat) -> Result<ExitCode> {
        let text = report.render(format)?;
        match &self.output {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
            None => print!("{text}"),
        }
        Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
    }
}

impl ProblemArgs {
    fn mesh(&self) -> Result<LabeledMesh> {
        match (&self.n, &self.mesh) {
            (Some(n), None) => {
                Ok(LabeledMesh { label: format!("N={n}"), mesh: TriangularMesh::structured_unit_square(*n)? })
            }
            (None, Some(p)) => Ok(LabeledMesh { label: p.display().to_string(), mesh: read_mesh_file(p)? }),
            _ => bail!("give either -n <N> or --mesh <path>"),
        }
    }

    fn instance(&self) -> Result<(Instance, Option<&'static str>)> {
        let field = CoefficientSpec::from_cli(&self.coeff)?.field()?;
        let inst = Instance::build(&self.mesh()?, &field, self.quadrature)?;
        Ok((inst, theory_tag(&field)))
    }
}

fn write_mesh(mesh: &TriangularMesh, output: &Path) -> Result<()> {
    if output.extension().and_then(|e| e.to_str()) == Some("json") {
        std::fs::write(output, mesh_json::to_json(mesh)?).with_context(|| format!("writing {}", output.display()))?;
        eprintln!("wrote {}", output.display());
    } else {
        let (node, ele) = triangle::write_triangle_files(mesh, output)?;
        eprintln!("wrote {} and {}", node.display(), ele.display());
    }
    eprintln!(
        "{} nodes, {} triangles, {} interior, h = {:.4e}",
        mesh.num_nodes(),
        mesh.num_triangles(),
        mesh.num_interior(),
        mesh.h()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Assemble { problem, out_dir } => {
            let (inst, tag) = problem.instance()?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let s = &inst.system;
            let p = inst.precond.to_matrix();
            let files = [
                ("theta.mtx", matrix_market::write_matrix(&s.theta)),
                ("psi.mtx", matrix_market::write_matrix(&s.psi)),
                ("re.mtx", matrix_market::write_matrix(&s.re_part)),
                ("skew.mtx", matrix_market::write_matrix(&s.skew_part)),
                ("precond.mtx", matrix_market::write_matrix(&p)),
                ("load.mtx", matrix_market::write_vector(&s.load)),
            ];
            for (name, text) in files {
                let path = out_dir.join(name);
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            println!(
                "{}: n = {}, nnz(A) = {}, nnz(L) = {}{}",
                inst.label,
                inst.n(),
                s.matrix.nnz(),
                inst.precond.factor_nnz(),
                tag.map(|t| format!(" [{t}]")).unwrap_or_default()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { problem, mode, alpha, tol, json, solution } => {
            let (inst, tag) = problem.instance()?;
            let alpha = match parse_alpha(&alpha, 40)? {
                AlphaPolicy::Fixed(a) => a,
                AlphaPolicy::Optimal { steps } => {
                    let est = solver::optimal_alpha(&inst.system.re_part, &inst.precond, steps)?;
                    eprintln!(
                        "alpha* = {:.6} (lambda in [{:.4e}, {:.4e}], kappa = {:.4})",
                        est.alpha_star, est.lambda_min, est.lambda_max, est.kappa
                    );
                    est.alpha_star
                }
            };
            let t = tol.tolerances();
            let config = phss_core::PhssConfig {
                alpha,
                tol: t.tol,
                inner_tol: t.inner_tol,
                eta: t.eta,
                max_outer: t.max_outer,
                ..Default::default()
            };
            let start = Instant::now();
            let s = &inst.system;
            let p = (mode != Mode::Hss).then_some(&inst.precond);
            let sol = solver::solve(mode, &s.re_part, &s.skew_part, p, &s.load, &config)?;
            let elapsed = start.elapsed();
            let r = &sol.report;
            if json {
                println!("{}", serde_json::to_string_pretty(r)?);
            } else {
                println!(
                    "{} {} n = {} alpha = {:.4}: {} outer, PCG {}, PGMRES {}, residual {:.3e}, {}{}",
                    mode.name(),
                    inst.label,
                    inst.n(),
                    alpha,
                    r.outer_iterations,
                    r.cg_cell(),
                    r.gmres_cell(),
                    r.final_relative_residual,
                    if r.converged { "converged" } else { "NOT CONVERGED" },
                    tag.map(|t| format!(" [{t}]")).unwrap_or_default()
                );
            }
            eprintln!("solve time {:.3} ms", elapsed.as_secs_f64() * 1e3);
            if let Some(path) = solution {
                std::fs::write(&path, matrix_market::write_vector(&sol.x))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if r.converged { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NOT_CONVERGED) })
        }
        Command::Spectra { table, radii, cap } => {
            let mut spec = table.spec()?;
            if table.config.is_none() {
                spec.radii = radii;
                spec.dense_cap = cap;
            }
            let report = Report::Outliers(runner::run_outlier_table(&spec)?);
            table.emit(&report, spec.format)
        }
        Command::Table { table, alpha } => {
            let mut spec = table.spec()?;
            if table.config.is_none() {
                spec.alpha = parse_alpha(&alpha, spec.lanczos_steps)?;
            }
            let report = Report::Iterations(runner::run_iteration_table(&spec)?);
            table.emit(&report, spec.format)
        }
        Command::AlphaStudy { table, steps } => {
            let mut spec = table.spec()?;
            if table.config.is_none() {
                spec.lanczos_steps = steps;
            }
            let report = Report::Alpha(runner::run_alpha_study(&spec)?);
            table.emit(&report, spec.format)
        }
        Command::Mesh { command } => {
            match command {
                MeshCommand::Gen { n, jitter, seed, output } => {
                    let mesh = if jitter > 0.0 {
                        generate::jittered_unit_square(n, jitter, seed)?
                    } else {
                        TriangularMesh::structured_unit_square(n)?
                    };
                    write_mesh(&mesh, &output)?;
                }
                MeshCommand::Refine { input, times, output } => {
                    let mut mesh = read_mesh_file(&input)?;
                    for _ in 0..times {
                        mesh = mesh.refine()?;
                    }
                    write_mesh(&mesh, &output)?;
                }
                MeshCommand::Convert { input, output } => write_mesh(&read_mesh_file(&input)?, &output)?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
