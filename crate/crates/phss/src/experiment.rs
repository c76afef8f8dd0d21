//! Experiment descriptions, loadable from JSON.
//!
//! ```json
//! {
//!   "mesh": { "structured": { "sizes": [10, 20, 40] } },
//!   "coefficient": "a1",
//!   "modes": ["PHSS", "IPHSS"],
//!   "alpha": { "fixed": 1.0 },
//!   "format": "markdown"
//! }
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use phss_core::coefficients::{CoefficientField, Smoothness};
use phss_core::spectra::{DEFAULT_DENSE_CAP, DEFAULT_RADII};
use phss_core::{Mode, PhssConfig, QuadratureRule, TriangularMesh};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::expr::{self, Expr};
use crate::{generate, mesh_json, triangle};

/// Where the meshes of an experiment come from. Each variant yields an ordered
/// list of meshes, one table row each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshSource {
    /// `N × N` structured meshes of the unit square.
    Structured { sizes: Vec<usize> },
    /// Structured topology with jittered interior nodes.
    Jittered {
        sizes: Vec<usize>,
        amplitude: f64,
        #[serde(default)]
        seed: u64,
    },
    /// Mesh files: Triangle base names (`.node`/`.ele`) or `.json` dumps.
    Files { paths: Vec<PathBuf> },
    /// A base mesh followed by `levels` uniform refinements of it.
    RefineChain { base: BaseMesh, levels: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMesh {
    Structured(usize),
    File(PathBuf),
}

/// A mesh with the label used in reports.
#[derive(Debug, Clone)]
pub struct LabeledMesh {
    pub label: String,
    pub mesh: TriangularMesh,
}

pub fn read_mesh_file(path: &Path) -> Result<TriangularMesh> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        mesh_json::from_json(&text)
    } else {
        triangle::read_triangle_files(path)
    }
}

impl BaseMesh {
    fn load(&self) -> Result<LabeledMesh> {
        Ok(match self {
            BaseMesh::Structured(n) => {
                LabeledMesh { label: format!("N={n}"), mesh: TriangularMesh::structured_unit_square(*n)? }
            }
            BaseMesh::File(p) => LabeledMesh { label: p.display().to_string(), mesh: read_mesh_file(p)? },
        })
    }
}

impl MeshSource {
    pub fn structured(sizes: impl Into<Vec<usize>>) -> Self {
        MeshSource::Structured { sizes: sizes.into() }
    }

    pub fn len(&self) -> usize {
        match self {
            MeshSource::Structured { sizes } | MeshSource::Jittered { sizes, .. } => sizes.len(),
            MeshSource::Files { paths } => paths.len(),
            MeshSource::RefineChain { levels, .. } => levels + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn load(&self) -> Result<Vec<LabeledMesh>> {
        match self {
            MeshSource::Structured { sizes } => sizes
                .iter()
                .map(|&n| Ok(LabeledMesh { label: format!("N={n}"), mesh: TriangularMesh::structured_unit_square(n)? }))
                .collect(),
            MeshSource::Jittered { sizes, amplitude, seed } => sizes
                .iter()
                .map(|&n| {
                    Ok(LabeledMesh {
                        label: format!("N={n}~{amplitude}"),
                        mesh: generate::jittered_unit_square(n, *amplitude, *seed)?,
                    })
                })
                .collect(),
            MeshSource::Files { paths } => paths
                .iter()
                .map(|p| Ok(LabeledMesh { label: p.display().to_string(), mesh: read_mesh_file(p)? }))
                .collect(),
            MeshSource::RefineChain { base, levels } => {
                let first = base.load()?;
                let mut out = vec![first];
                for k in 1..=*levels {
                    let mesh = out[k - 1].mesh.refine()?;
                    out.push(LabeledMesh { label: format!("{}/r{k}", out[0].label), mesh });
                }
                Ok(out)
            }
        }
    }
}

/// A builtin name (`"a1"`) or user expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Builtin(String),
    Expression {
        #[serde(default)]
        name: Option<String>,
        /// Diffusion `a(x, y)`.
        a: String,
        /// Convection components; zero when absent.
        #[serde(default)]
        beta: Option<[String; 2]>,
        /// Load; `1` when absent.
        #[serde(default)]
        f: Option<String>,
    },
}

/// Sample grid for the divergence check of user fields.
const DIVERGENCE_SAMPLES: usize = 20;

impl CoefficientSpec {
    pub fn builtin(name: &str) -> Self {
        CoefficientSpec::Builtin(name.to_string())
    }

    /// Builds the field. Builtins also accept `laplace` and `manufactured`.
    pub fn field(&self) -> Result<CoefficientField> {
        match self {
            CoefficientSpec::Builtin(name) => match name.as_str() {
                "laplace" => Ok(CoefficientField::laplace()),
                "manufactured" => Ok(CoefficientField::manufactured_poisson()),
                other => Ok(CoefficientField::builtin(other)?),
            },
            CoefficientSpec::Expression { name, a, beta, f } => {
                let a = Expr::parse(a)?;
                let label = name.clone().unwrap_or_else(|| format!("a={}", a.source()));
                let mut field =
                    CoefficientField::laplace().with_name(label).with_diffusion(a.into_fn(), Smoothness::Unknown);
                if let Some([bx, by]) = beta {
                    let (bx, by) = (Expr::parse(bx)?, Expr::parse(by)?);
                    field = field.with_convection(Arc::new(move |x, y| [bx.eval(x, y), by.eval(x, y)]));
                }
                if let Some(f) = f {
                    field = field.with_load(Expr::parse(f)?.into_fn());
                }
                let nonneg = field.check_divergence(DIVERGENCE_SAMPLES).is_ok();
                Ok(field.with_divergence_nonnegative(nonneg))
            }
        }
    }

    /// Parses the command-line form: a builtin name, or `a=<expr>` optionally
    /// followed by `;beta=<expr>,<expr>` and `;f=<expr>`.
    pub fn from_cli(text: &str) -> Result<Self> {
        if !text.contains('=') {
            return Ok(CoefficientSpec::builtin(text.trim()));
        }
        let (mut a, mut beta, mut f) = (None, None, None);
        for part in text.split(';') {
            let (key, value) =
                part.split_once('=').ok_or_else(|| HarnessError::Config(format!("expected key=value in `{part}`")))?;
            match key.trim() {
                "a" => a = Some(value.trim().to_string()),
                "beta" => {
                    let [bx, by] = expr::parse_pair(value)?;
                    beta = Some([bx.source().trim().to_string(), by.source().trim().to_string()]);
                }
                "f" => f = Some(value.trim().to_string()),
                other => return Err(HarnessError::Config(format!("unknown coefficient key `{other}`"))),
            }
        }
        let a = a.ok_or_else(|| HarnessError::Config("coefficient expression needs `a=`".into()))?;
        Ok(CoefficientSpec::Expression { name: None, a, beta, f })
    }
}

/// Tag attached to reports whose coefficient is not covered by the
/// convergence theory (which assumes `a ∈ C²` and `div β ≥ 0`).
pub fn theory_tag(field: &CoefficientField) -> Option<&'static str> {
    if !field.divergence_nonnegative() {
        Some("outside theory (div beta < 0)")
    } else {
        match field.smoothness() {
            Smoothness::C2 => None,
            Smoothness::Unknown => Some("smoothness unknown"),
            _ => Some("outside theory"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaPolicy {
    Fixed(f64),
    /// `α* = √(λ_min λ_max)` from a Lanczos estimate with this many steps.
    Optimal {
        steps: usize,
    },
}

impl Default for AlphaPolicy {
    fn default() -> Self {
        AlphaPolicy::Fixed(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    #[default]
    Markdown,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            "json" => Ok(Self::Json),
            _ => Err(HarnessError::Config(format!("unknown output format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Outer stop on the relative residual.
    pub tol: f64,
    pub inner_tol: f64,
    pub eta: f64,
    pub max_outer: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = PhssConfig::default();
        Self { tol: c.tol, inner_tol: c.inner_tol, eta: c.eta, max_outer: c.max_outer }
    }
}

fn default_modes() -> Vec<Mode> {
    vec![Mode::Phss, Mode::Iphss]
}

fn default_radii() -> Vec<f64> {
    DEFAULT_RADII.to_vec()
}

fn default_cap() -> usize {
    DEFAULT_DENSE_CAP
}

fn default_steps() -> usize {
    40
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub mesh: MeshSource,
    pub coefficient: CoefficientSpec,
    #[serde(default = "default_modes")]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub alpha: AlphaPolicy,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub quadrature: QuadratureRule,
    /// Outlier radii for spectral tables.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Largest dimension for dense analysis.
    #[serde(default = "default_cap")]
    pub dense_cap: usize,
    /// Lanczos steps for shift estimates in the shift study.
    #[serde(default = "default_steps")]
    pub lanczos_steps: usize,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentSpec {
    pub fn new(mesh: MeshSource, coefficient: CoefficientSpec) -> Self {
        Self {
            mesh,
            coefficient,
            modes: default_modes(),
            alpha: AlphaPolicy::default(),
            tolerances: Tolerances::default(),
            quadrature: QuadratureRule::default(),
            radii: default_radii(),
            dense_cap: default_cap(),
            lanczos_steps: default_steps(),
            format: OutputFormat::default(),
        }
    }

    pub fn with_modes(mut self, modes: impl Into<Vec<Mode>>) -> Self {
        self.modes = modes.into();
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mesh.is_empty() {
            return Err(HarnessError::Config("no meshes".into()));
        }
        if self.modes.is_empty() {
            return Err(HarnessError::Config("empty mode list".into()));
        }
        if let AlphaPolicy::Fixed(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(HarnessError::Config(format!("alpha must be positive, got {a}")));
            }
        }
        if self.radii.iter().any(|r| !(*r > 0.0)) {
            return Err(HarnessError::Config("outlier radii must be positive".into()));
        }
        self.config(1.0).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }

    /// Solver configuration for a given shift.
    pub fn config(&self, alpha: f64) -> std::result::Result<PhssConfig, phss_core::Error> {
        let t = &self.tolerances;
        let c = PhssConfig {
            alpha,
            tol: t.tol,
            max_outer: t.max_outer,
            eta: t.eta,
            inner_tol: t.inner_tol,
            ..PhssConfig::default()
        };
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults() {
        let s = ExperimentSpec::from_json(r#"{"mesh":{"structured":{"sizes":[10]}},"coefficient":"a1"}"#).unwrap();
        assert_eq!(s.modes, vec![Mode::Phss, Mode::Iphss]);
        assert_eq!(s.alpha, AlphaPolicy::Fixed(1.0));
        assert_eq!(s.radii, vec![0.1, 0.01]);
        assert_eq!(s.quadrature, QuadratureRule::Barycenter);
    }

    #[test]
    fn empty_modes_rejected() {
        let text = r#"{"mesh":{"structured":{"sizes":[10]}},"coefficient":"a1","modes":[]}"#;
        assert!(matches!(ExperimentSpec::from_json(text), Err(HarnessError::Config(_))));
        let text = r#"{"mesh":{"structured":{"sizes":[]}},"coefficient":"a1"}"#;
        assert!(matches!(ExperimentSpec::from_json(text), Err(HarnessError::Config(_))));
    }

    #[test]
    fn expression_coefficients() {
        let text = r#"{"mesh":{"refine_chain":{"base":{"structured":4},"levels":2}},
            "coefficient":{"a":"1 + 9*step(y - 0.5)","beta":["x","y"]},
            "modes":["HSS","PHSS"],"alpha":{"optimal":{"steps":20}},"format":"csv"}"#;
        let s = ExperimentSpec::from_json(text).unwrap();
        let meshes = s.mesh.load().unwrap();
        assert_eq!(meshes.iter().map(|m| m.mesh.num_interior()).collect::<Vec<_>>(), vec![9, 49, 225]);
        let f = s.coefficient.field().unwrap();
        assert_eq!(f.a(0.25, 0.75), 10.0);
        assert_eq!(f.beta(0.3, 0.7), [0.3, 0.7]);
        assert_eq!(theory_tag(&f), Some("smoothness unknown"));
        assert_eq!(s.alpha, AlphaPolicy::Optimal { steps: 20 });
    }

    #[test]
    fn cli_coefficients() {
        assert_eq!(CoefficientSpec::from_cli("a3").unwrap(), CoefficientSpec::builtin("a3"));
        let c = CoefficientSpec::from_cli("a=exp(x+y); beta=x, y; f=2").unwrap();
        let f = c.field().unwrap();
        assert!((f.a(0.5, 0.5) - 1f64.exp()).abs() < 1e-15);
        assert_eq!(f.f(0.1, 0.1), 2.0);
        let neg = CoefficientSpec::from_cli("a=1;beta=-x,0").unwrap().field().unwrap();
        assert_eq!(theory_tag(&neg), Some("outside theory (div beta < 0)"));
        assert!(CoefficientSpec::from_cli("b=1").is_err());
    }

    #[test]
    fn theory_tags_for_builtins() {
        let tag = |n: &str| theory_tag(&CoefficientSpec::builtin(n).field().unwrap());
        assert_eq!(tag("a1"), None);
        for n in ["a2", "a3", "a4"] {
            assert_eq!(tag(n), Some("outside theory"));
        }
    }
}
