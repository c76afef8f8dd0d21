use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidArgument(String),
    /// Invalid mesh data; `element` is the offending triangle when known.
    InvalidMesh {
        element: Option<usize>,
        reason: String,
    },
    /// A coefficient evaluated to something the assembly cannot accept.
    Assembly {
        element: usize,
        reason: String,
    },
    /// Preconditioner construction failed (bad diagonal, size mismatch).
    Build(String),
    /// Cholesky factorization hit a nonpositive pivot.
    NotPositiveDefinite {
        pivot: usize,
        value: f64,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Dense analysis refused because the problem is too large.
    TooLarge {
        n: usize,
        cap: usize,
    },
    /// Iterative eigenvalue or QL iteration failed to converge.
    NoConvergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::InvalidMesh { element: Some(e), reason } => {
                write!(f, "invalid mesh (triangle {e}): {reason}")
            }
            Error::InvalidMesh { element: None, reason } => write!(f, "invalid mesh: {reason}"),
            Error::Assembly { element, reason } => {
                write!(f, "assembly error in triangle {element}: {reason}")
            }
            Error::Build(msg) => write!(f, "preconditioner build error: {msg}"),
            Error::NotPositiveDefinite { pivot, value } => {
                write!(f, "factorization error: pivot {pivot} is {value:e}, matrix is not positive definite")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::TooLarge { n, cap } => {
                write!(f, "dense analysis refused for n = {n} (cap {cap}); use a coarser mesh or raise the cap")
            }
            Error::NoConvergence(msg) => write!(f, "no convergence: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
