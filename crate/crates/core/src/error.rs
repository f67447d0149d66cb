use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid surface tension: {0}")]
    InvalidTension(String),
    #[error("convexity certificate failed: min f + f'' = {min_value:.3e} at theta = {theta:.6}")]
    NotConvex { min_value: f64, theta: f64 },
    #[error("Wulff shape is unbounded (origin not interior to the convex hull)")]
    UnboundedWulff,
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("unsupported representation: {0}")]
    Unsupported(String),
    #[error("tension {0} is not smooth; pointwise curvature is undefined")]
    NonSmoothTension(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("perturbation outside the small-C1 regime: |u|_C1 = {norm:.4} > {bound}")]
    OutOfRegime { norm: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
