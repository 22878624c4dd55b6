use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}({at}) overflows the floating-point range")]
    Overflow { function: &'static str, at: f64 },

    #[error("{function}: argument outside the domain ({detail})")]
    Domain { function: &'static str, detail: String },

    #[error("{function}({args}) did not reach relative tolerance {tol:e} (best estimate {estimate:e})")]
    AccuracyLoss {
        function: &'static str,
        args: String,
        tol: f64,
        estimate: f64,
    },

    #[error("2F1 diverges at z = 1 because c - a - b = {excess} <= 0")]
    Divergence { excess: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no lattice point of spacing {h} lies strictly inside the domain")]
    EmptyGrid { h: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entry ({row}, {col}): {source}")]
    Assembly {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is numerically singular")]
    Singular,

    #[error("residual {residual:e} above tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("iterative solver stagnated after {iterations} iterations (best residual {best_residual:e})")]
    Stagnation { iterations: usize, best_residual: f64 },

    #[error("dense path limited to {limit} unknowns, got {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("tail bound {bound:e} at radius {radius} exceeds tolerance {tol:e}; increase the radius")]
    TailTooLarge { radius: f64, bound: f64, tol: f64 },

    #[error("auxiliary fit rms {achieved:e} exceeds tolerance {tol:e} (condition estimate {condition:e})")]
    FitTolerance {
        achieved: f64,
        tol: f64,
        condition: f64,
    },

    #[error("contour radius {rho} must be below {limit}")]
    ContourRadius { rho: f64, limit: f64 },

    #[error("lattice sum truncated at {cut} is not certified (tail {tail:e})")]
    Truncation { cut: usize, tail: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
