//! Table runners: iteration counts, spectral outliers and the shift study.
//!
//! Meshes are processed in parallel; rows always come back in spec order.
//! Failures that concern a single mesh (non-convergence, a dense cap) are
//! recorded on the row and the run continues.

use phss_core::assembly::{assemble_laplacian, AssembledSystem};
use phss_core::phss::{self, AlphaEstimate};
use phss_core::spectra::{self, SpectralReport};
use phss_core::{assemble, CoefficientField, IterationReport, Mode, PhssPreconditioner, QuadratureRule};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiment::{theory_tag, AlphaPolicy, ExperimentSpec, LabeledMesh};

/// Assembled operators and preconditioner for one mesh.
pub struct Instance {
    pub label: String,
    pub h: f64,
    pub system: AssembledSystem,
    pub precond: PhssPreconditioner,
}

impl Instance {
    pub fn build(mesh: &LabeledMesh, field: &CoefficientField, rule: QuadratureRule) -> Result<Self> {
        let system = assemble(&mesh.mesh, field, rule)?;
        let precond = PhssPreconditioner::build(&system.theta, &assemble_laplacian(&mesh.mesh))?;
        Ok(Self { label: mesh.label.clone(), h: mesh.mesh.h(), system, precond })
    }

    pub fn n(&self) -> usize {
        self.system.dim()
    }

    pub fn solve(&self, mode: Mode, config: &phss_core::PhssConfig) -> Result<IterationReport> {
        let s = &self.system;
        let p = (mode != Mode::Hss).then_some(&self.precond);
        Ok(phss::solve(mode, &s.re_part, &s.skew_part, p, &s.load, config)?.report)
    }
}

/// Outcome of one solver run, as shown in a table cell group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeResult {
    pub mode: Mode,
    pub alpha: f64,
    pub outer: usize,
    pub cg_total: usize,
    pub gmres_total: usize,
    pub cg_avg: f64,
    pub gmres_avg: f64,
    pub converged: bool,
    pub final_residual: f64,
}

impl From<&IterationReport> for ModeResult {
    fn from(r: &IterationReport) -> Self {
        Self {
            mode: r.mode,
            alpha: r.alpha,
            outer: r.outer_iterations,
            cg_total: r.total_cg(),
            gmres_total: r.total_gmres(),
            cg_avg: r.avg_cg(),
            gmres_avg: r.avg_gmres(),
            converged: r.converged,
            final_residual: r.final_relative_residual,
        }
    }
}

impl ModeResult {
    /// `"avg (total)"`
    pub fn cg_cell(&self) -> String {
        format!("{:.1} ({})", self.cg_avg, self.cg_total)
    }

    pub fn gmres_cell(&self) -> String {
        format!("{:.1} ({})", self.gmres_avg, self.gmres_total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub label: String,
    pub n: usize,
    pub h: f64,
    pub results: Vec<ModeResult>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTable {
    pub coefficient: String,
    pub tag: Option<String>,
    pub modes: Vec<Mode>,
    pub rows: Vec<IterationRow>,
}

impl IterationTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.flags.is_empty() && r.results.iter().all(|m| m.converged))
    }
}

fn error_row_flags(e: impl std::fmt::Display) -> Vec<String> {
    vec![format!("error: {e}")]
}

fn prepare(spec: &ExperimentSpec) -> Result<(CoefficientField, Vec<LabeledMesh>)> {
    spec.validate()?;
    let field = spec.coefficient.field()?;
    let meshes = spec.mesh.load()?;
    Ok((field, meshes))
}

fn resolve_alpha(spec: &ExperimentSpec, inst: &Instance) -> Result<f64> {
    Ok(match spec.alpha {
        AlphaPolicy::Fixed(a) => a,
        AlphaPolicy::Optimal { steps } => phss::optimal_alpha(&inst.system.re_part, &inst.precond, steps)?.alpha_star,
    })
}

fn run_modes(spec: &ExperimentSpec, inst: &Instance, alpha: f64) -> Result<Vec<ModeResult>> {
    let config = spec.config(alpha)?;
    spec.modes.iter().map(|&m| Ok(ModeResult::from(&inst.solve(m, &config)?))).collect()
}

fn convergence_flags(results: &[ModeResult]) -> Vec<String> {
    results
        .iter()
        .filter(|r| !r.converged)
        .map(|r| format!("{} not converged (residual {:.2e})", r.mode.name(), r.final_residual))
        .collect()
}

/// Outer iterations and inner averages per mesh and mode.
pub fn run_iteration_table(spec: &ExperimentSpec) -> Result<IterationTable> {
    let (field, meshes) = prepare(spec)?;
    let rows = meshes
        .par_iter()
        .map(|lm| {
            let n = lm.mesh.num_interior();
            let h = lm.mesh.h();
            let outcome = Instance::build(lm, &field, spec.quadrature).and_then(|inst| {
                let alpha = resolve_alpha(spec, &inst)?;
                run_modes(spec, &inst, alpha)
            });
            match outcome {
                Ok(results) => {
                    let flags = convergence_flags(&results);
                    IterationRow { label: lm.label.clone(), n, h, results, flags }
                }
                Err(e) => IterationRow { label: lm.label.clone(), n, h, results: vec![], flags: error_row_flags(e) },
            }
        })
        .collect();
    Ok(IterationTable {
        coefficient: field.name().to_string(),
        tag: theory_tag(&field).map(str::to_string),
        modes: spec.modes.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRow {
    pub label: String,
    pub n: usize,
    pub h: f64,
    pub spectra: Option<SpectralReport>,
    /// `‖E‖₂`, `‖E‖_∞` and `‖E‖_∞ / h²`.
    pub e_norm_2: Option<f64>,
    pub e_norm_inf: Option<f64>,
    pub e_ratio: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierTable {
    pub coefficient: String,
    pub tag: Option<String>,
    pub radii: Vec<f64>,
    pub rows: Vec<OutlierRow>,
}

impl OutlierTable {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.flags.is_empty())
    }
}

/// Spectra of both preconditioned pencils per mesh, with outlier counts and
/// the norms of `E`. Meshes above the dense cap are refused row by row.
pub fn run_outlier_table(spec: &ExperimentSpec) -> Result<OutlierTable> {
    let (field, meshes) = prepare(spec)?;
    let rows = meshes
        .par_iter()
        .map(|lm| {
            let mut row = OutlierRow {
                label: lm.label.clone(),
                n: lm.mesh.num_interior(),
                h: lm.mesh.h(),
                spectra: None,
                e_norm_2: None,
                e_norm_inf: None,
                e_ratio: None,
                flags: vec![],
            };
            let outcome = Instance::build(lm, &field, spec.quadrature).and_then(|inst| {
                let report = spectra::analyze(&inst.system, &inst.precond, &spec.radii, spec.dense_cap)?;
                let norms = spectra::e_norms(&inst.system, spec.dense_cap)?;
                Ok((report, norms))
            });
            match outcome {
                Ok((report, (two, inf))) => {
                    row.spectra = Some(report);
                    row.e_norm_2 = Some(two);
                    row.e_norm_inf = Some(inf);
                    row.e_ratio = Some(inf / (row.h * row.h));
                }
                Err(e) => row.flags = error_row_flags(e),
            }
            row
        })
        .collect();
    Ok(OutlierTable {
        coefficient: field.name().to_string(),
        tag: theory_tag(&field).map(str::to_string),
        radii: spec.radii.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub label: String,
    pub n: usize,
    pub estimate: Option<AlphaEstimate>,
    pub at_one: Vec<ModeResult>,
    pub at_star: Vec<ModeResult>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTable {
    pub coefficient: String,
    pub tag: Option<String>,
    pub modes: Vec<Mode>,
    pub rows: Vec<AlphaRow>,
}

impl AlphaTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.flags.is_empty())
    }
}

/// Estimated `α*`, `κ`, `σ(α*)` and iteration counts at `α = 1` and `α = α*`.
/// The spec's alpha policy is ignored; the Lanczos step count comes from
/// `lanczos_steps`.
pub fn run_alpha_study(spec: &ExperimentSpec) -> Result<AlphaTable> {
    let (field, meshes) = prepare(spec)?;
    let rows = meshes
        .par_iter()
        .map(|lm| {
            let n = lm.mesh.num_interior();
            let outcome = Instance::build(lm, &field, spec.quadrature).and_then(|inst| {
                let est = phss::optimal_alpha(&inst.system.re_part, &inst.precond, spec.lanczos_steps)?;
                let at_one = run_modes(spec, &inst, 1.0)?;
                let at_star = run_modes(spec, &inst, est.alpha_star)?;
                Ok((est, at_one, at_star))
            });
            match outcome {
                Ok((est, at_one, at_star)) => {
                    let mut flags = convergence_flags(&at_one);
                    flags.extend(convergence_flags(&at_star).into_iter().map(|f| format!("{f} at alpha*")));
                    AlphaRow { label: lm.label.clone(), n, estimate: Some(est), at_one, at_star, flags }
                }
                Err(e) => AlphaRow {
                    label: lm.label.clone(),
                    n,
                    estimate: None,
                    at_one: vec![],
                    at_star: vec![],
                    flags: error_row_flags(e),
                },
            }
        })
        .collect();
    Ok(AlphaTable {
        coefficient: field.name().to_string(),
        tag: theory_tag(&field).map(str::to_string),
        modes: spec.modes.clone(),
        rows,
    })
}
