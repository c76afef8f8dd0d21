//! Diffusion, convection and load fields.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

use crate::math;
use crate::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(f64, f64) -> [f64; 2] + Send + Sync>;

/// Regularity class of the diffusion coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Smoothness {
    C2,
    C1,
    C0,
    PiecewiseConstant,
    Unknown,
}

/// Coefficients of `div(−a ∇u + β u) = f` on the unit square.
#[derive(Clone)]
pub struct CoefficientField {
    name: String,
    smoothness: Smoothness,
    divergence_nonnegative: bool,
    a: ScalarFn,
    beta: VectorFn,
    f: ScalarFn,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("name", &self.name)
            .field("smoothness", &self.smoothness)
            .field("divergence_nonnegative", &self.divergence_nonnegative)
            .finish_non_exhaustive()
    }
}

fn linear_beta() -> VectorFn {
    Arc::new(|x, y| [x, y])
}

fn unit_load() -> ScalarFn {
    Arc::new(|_, _| 1.0)
}

impl CoefficientField {
    pub fn new(name: impl Into<String>, smoothness: Smoothness, a: ScalarFn, beta: VectorFn, f: ScalarFn) -> Self {
        Self { name: name.into(), smoothness, divergence_nonnegative: true, a, beta, f }
    }

    /// One of the test fields `a1`..`a4`, all with `β(x, y) = [x, y]ᵀ` and `f ≡ 1`:
    ///
    /// * `a1 = exp(x + y)` (C²)
    /// * `a2 = exp(x + |y − 1/2|^{3/2})` (C¹)
    /// * `a3 = exp(x + |y − 1/2|)` (C⁰)
    /// * `a4 = 1` for `y < 1/2`, `10` otherwise
    pub fn builtin(name: &str) -> Result<Self> {
        let (a, smoothness): (ScalarFn, Smoothness) = match name {
            "a1" => (Arc::new(|x, y| math::exp(x + y)), Smoothness::C2),
            "a2" => (Arc::new(|x, y| math::exp(x + math::pow(math::abs(y - 0.5), 1.5))), Smoothness::C1),
            "a3" => (Arc::new(|x, y| math::exp(x + math::abs(y - 0.5))), Smoothness::C0),
            "a4" => (Arc::new(|_, y| if y < 0.5 { 1.0 } else { 10.0 }), Smoothness::PiecewiseConstant),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown builtin coefficient `{other}` (expected a1, a2, a3 or a4)"
                )))
            }
        };
        Ok(Self::new(name, smoothness, a, linear_beta(), unit_load()))
    }

    /// `a ≡ 1`, `β ≡ 0`, `f ≡ 1`.
    pub fn laplace() -> Self {
        Self::constant("laplace", 1.0, [0.0, 0.0])
    }

    /// Constant diffusion and convection with unit load.
    pub fn constant(name: impl Into<String>, a: f64, beta: [f64; 2]) -> Self {
        Self::new(name, Smoothness::C2, Arc::new(move |_, _| a), Arc::new(move |_, _| beta), unit_load())
    }

    /// Poisson problem with exact solution `u = sin(πx) sin(πy)`:
    /// `a ≡ 1`, `β ≡ 0`, `f = 2π² sin(πx) sin(πy)`.
    pub fn manufactured_poisson() -> Self {
        Self::laplace()
            .with_name("manufactured")
            .with_load(Arc::new(|x, y| 2.0 * PI * PI * math::sin(PI * x) * math::sin(PI * y)))
    }

    /// Exact solution of [`manufactured_poisson`](Self::manufactured_poisson).
    pub fn manufactured_solution(x: f64, y: f64) -> f64 {
        math::sin(PI * x) * math::sin(PI * y)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_load(mut self, f: ScalarFn) -> Self {
        self.f = f;
        self
    }

    pub fn with_diffusion(mut self, a: ScalarFn, smoothness: Smoothness) -> Self {
        self.a = a;
        self.smoothness = smoothness;
        self
    }

    pub fn with_convection(mut self, beta: VectorFn) -> Self {
        self.beta = beta;
        self
    }

    /// Marks whether `div β ≥ 0` is claimed (and checked by
    /// [`check_divergence`](Self::check_divergence)).
    pub fn with_divergence_nonnegative(mut self, flag: bool) -> Self {
        self.divergence_nonnegative = flag;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn divergence_nonnegative(&self) -> bool {
        self.divergence_nonnegative
    }

    /// `true` when the diffusion coefficient is at least C², the regularity
    /// under which the clustering results are known to hold.
    pub fn within_theory(&self) -> bool {
        self.smoothness == Smoothness::C2
    }

    #[inline]
    pub fn a(&self, x: f64, y: f64) -> f64 {
        (self.a)(x, y)
    }

    #[inline]
    pub fn beta(&self, x: f64, y: f64) -> [f64; 2] {
        (self.beta)(x, y)
    }

    #[inline]
    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    /// Central-difference estimate of `div β` at `(x, y)`.
    pub fn divergence_estimate(&self, x: f64, y: f64) -> f64 {
        let s = 1e-5;
        let bx = (self.beta(x + s, y)[0] - self.beta(x - s, y)[0]) / (2.0 * s);
        let by = (self.beta(x, y + s)[1] - self.beta(x, y - s)[1]) / (2.0 * s);
        bx + by
    }

    /// Checks `div β ≥ −1e−8` on an `m × m` grid of interior points when the
    /// field claims a nonnegative divergence.
    pub fn check_divergence(&self, m: usize) -> Result<()> {
        if !self.divergence_nonnegative {
            return Ok(());
        }
        for j in 0..m {
            for i in 0..m {
                let (x, y) = ((i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64);
                let div = self.divergence_estimate(x, y);
                if div < -1e-8 {
                    return Err(Error::InvalidArgument(format!(
                        "coefficient `{}`: div β = {div:e} < 0 at ({x}, {y})",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}
