//! Error taxonomy shared by the library and the command line front end.
//!
//! `Config` and `Domain` mark bad inputs (exit code 2 in the CLI); the
//! remaining variants mark numerical failures discovered at run time
//! (exit code 1).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent run configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Covariance factorization failed; the matrix is numerically singular.
    /// Adding jitter of the suggested size to the diagonal may help.
    #[error("cholesky factorization failed at pivot {pivot}: diagonal {diag:.3e}; consider jitter ~{jitter:.3e}")]
    Factorization { pivot: usize, diag: f64, jitter: f64 },

    /// Circulant embedding produced a negative eigenvalue, so the fast
    /// sampler cannot be used for this grid.
    #[error("circulant embedding not nonnegative definite: min eigenvalue {min_eig:.3e}")]
    Embedding { min_eig: f64 },

    /// Step-function breakpoints do not lie on the path grid.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// An iteration failed to contract; the residual history is kept for
    /// replay and diagnosis.
    #[error("fixed-point iteration diverged after {windows} window halvings; last residuals {residuals:?}")]
    Divergence { windows: usize, residuals: Vec<f64> },

    /// A trajectory left the trust region of the integrator.
    #[error("numerical blow-up: {0}")]
    BlowUp(String),

    /// Generic numerical failure with context.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            _ => 1,
        }
    }
}
