use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or physically inconsistent input.
    #[error("invalid input: {0}")]
    Input(String),

    /// A requested Hilbert space exceeds the configured cap.
    #[error("{what} dimension {dim} exceeds the cap of {cap}")]
    Resource {
        what: &'static str,
        dim: usize,
        cap: usize,
    },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// The adaptive integrator could not make progress at the requested
    /// tolerance.
    #[error(
        "step size underflow at t = {t:.6e} (h = {h:.3e}); the problem is too stiff for \
         the explicit integrator at this tolerance, use the rate-equation path instead"
    )]
    StepUnderflow { t: f64, h: f64 },

    #[error("measurement outcome {0} has zero probability")]
    ZeroProbability(String),

    /// A monitored density-matrix invariant was violated.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
