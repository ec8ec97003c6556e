use thiserror::Error;

/// Errors raised by the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point on or outside the unit circle, or an operation undefined at
    /// the given point.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed input: overlapping arcs, bad parameters, bad files.
    #[error("input error: {0}")]
    Input(String),

    #[error("quadrature size {n} out of range [{min}, {max}]")]
    QuadratureSize { n: usize, min: usize, max: usize },

    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    /// Adaptive integration ran out of depth; carries the best estimate.
    #[error("accuracy target not met, best estimate {estimate} (error ~{error:e})")]
    Accuracy { estimate: f64, error: f64 },

    /// A linear system that could not be solved reliably after regularization.
    #[error("numerical failure: {message} (condition estimate {condition:e})")]
    Numerical { message: String, condition: f64 },

    /// A plate too small for the grid it is rasterized on.
    #[error("resolution error: plate `{plate}` covers {cells} cells, need at least {required}")]
    Resolution {
        plate: String,
        cells: usize,
        required: usize,
    },

    /// Generator could not place a point.
    #[error("infeasible placement: point {index} could not be placed ({reason})")]
    Infeasible { index: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
