use thiserror::Error;

/// Errors raised by the discretization, solvers and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported polynomial order {order} (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("unsupported quadrature degree {degree} (maximum {max})")]
    UnsupportedQuadrature { degree: usize, max: usize },

    #[error("degenerate element {element}: signed area {area:e}")]
    SingularMap { element: usize, area: f64 },

    #[error("mesh inconsistency: {0}")]
    Inconsistent(String),

    #[error("matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NotSpd { pivot: usize, value: f64 },

    #[error("Gram matrix of element {element} is not positive definite (pivot {pivot})")]
    Assembly { element: usize, pivot: usize },

    #[error("reaction coefficient must be positive, got {value} at ({x}, {y})")]
    InvalidCoefficient { value: f64, x: f64, y: f64 },

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("numerical breakdown in conjugate gradients at iteration {0}")]
    Breakdown(usize),

    #[error("mesh parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
