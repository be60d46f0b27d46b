use thiserror::Error;

use crate::integrator::Trajectory;

/// Errors raised by model construction and the numerical analyses.
#[derive(Debug, Error)]
pub enum Error {
    /// Evaluation point outside the validity domain `(-d, d)`.
    #[error("x = {x} lies outside the domain (-{d}, {d})")]
    Domain { x: f64, d: f64 },

    /// Segments overlap, leave gaps, or violate a form's own domain.
    #[error("invalid model structure: {0}")]
    Structure(String),

    #[error("unknown builtin model `{0}`")]
    UnknownModel(String),

    /// Missing or invalid parameter / configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// Quadrature or step-size failure.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A root equation has no sign change on the requested bracket.
    #[error("no root of {what} in [{lo}, {hi}]")]
    NoRoot { what: String, lo: f64, hi: f64 },

    #[error("analysis failed: {0}")]
    Analysis(String),

    /// The orbit did not return to the y-axis; carries what was integrated.
    #[error("orbit from y0 = {y0} did not return to the y-axis ({reason})")]
    NoReturn {
        y0: f64,
        reason: String,
        partial: Box<Trajectory>,
    },

    #[error("failed to parse model file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
