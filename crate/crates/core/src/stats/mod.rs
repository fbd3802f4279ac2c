//! Descriptive statistics, correlation, least squares and F tests.
//!
//! Everything here is implemented directly on `f64` slices; the matrices
//! involved are at most a handful of columns wide.

pub mod data;
pub mod descriptive;
pub mod models;
pub mod ols;
pub mod special;

use thiserror::Error;

pub use data::DataMatrix;
pub use descriptive::{descriptives, median, pearson_r, Correlation, Descriptives};
pub use models::{fit_quality_models, ModelSpec, QualityModels};
pub use ols::{linear_hypothesis, nested_f_test, ols_fit, significance_stars, Coefficient, FTestResult, OlsFit};
pub use special::{f_cdf, f_sf, inc_beta, ln_gamma, t_cdf, t_two_sided_p};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty input")]
    Empty,
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("column {column:?} row {row}: {reason}")]
    BadValue { column: String, row: usize, reason: String },
    #[error("design matrix is rank deficient; collinear columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),
    #[error("models are not nested: {0}")]
    NotNested(String),
    #[error("restricted covariance is singular")]
    SingularRestriction,
    #[error("data matrix csv: {0}")]
    Csv(String),
}
