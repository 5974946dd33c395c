use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("path-loss exponent must exceed 2, got {0}")]
    PathLossExponent(f64),
    #[error("`{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("`{name}` must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("p_min ({p_min} W) exceeds p_max ({p_max} W)")]
    PowerRange { p_min: f64, p_max: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchemeError {
    #[error("{scheme}: `{name}` = {value} is outside {range}")]
    Parameter {
        scheme: &'static str,
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         estimated error {achieved:e} exceeds requested {requested:e}"
    )]
    NoConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
        subdivisions: usize,
    },
    #[error("integrand returned a non-finite value at x = {0}")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("objective evaluation failed at {point:?}: {source}")]
    Objective {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid simulation setup: {0}")]
    Simulation(String),
    #[error("invalid optimisation problem: {0}")]
    Problem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
