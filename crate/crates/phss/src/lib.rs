//! File formats, experiment descriptions and the table runners behind the
//! `phss` command-line tool.
//!
//! The numerical work is done by [`phss_core`]; this crate reads and writes
//! meshes (Triangle `.node`/`.ele`, JSON) and matrices (MatrixMarket), parses
//! coefficient expressions, and turns an [`ExperimentSpec`] into iteration,
//! outlier and shift-study tables rendered as CSV, Markdown or JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod expr;
pub mod generate;
pub mod matrix_market;
pub mod mesh_json;
pub mod report;
pub mod runner;
pub mod triangle;

pub use error::{HarnessError, Result};
pub use experiment::{AlphaPolicy, CoefficientSpec, ExperimentSpec, MeshSource, OutputFormat};
pub use expr::Expr;
pub use runner::{run_alpha_study, run_iteration_table, run_outlier_table};
