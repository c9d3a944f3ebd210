use thiserror::Error;

/// Errors shared by every module of the lab.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the problem parameters was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The integrand has not decayed at the grid ends and the caller did not
    /// acknowledge truncation. Magnitudes are relative to the integrand max.
    #[error("truncation: integrand not decayed at grid ends (left {left:.3e}, right {right:.3e})")]
    Truncation { left: f64, right: f64 },

    /// A conformal rescale shifted non-negligible values off the grid.
    #[error("support loss: shift by {shift} nodes drops values up to {dropped:.3e} of max")]
    SupportLoss { shift: i64, dropped: f64 },

    /// A profile with vanishing critical norm was passed where a quotient is needed.
    #[error("degenerate profile: {0}")]
    Degenerate(String),

    /// An asymptotic fit exceeded the acceptance residual.
    #[error("fit rejected: relative RMS residual {residual:.3e} exceeds {limit:.2}")]
    FitRejected {
        residual: f64,
        limit: f64,
        per_point: Vec<f64>,
    },

    /// The two-term ray has no interior maximum (both nonlinear masses vanish).
    #[error("no maximum on ray: both nonlinear masses vanish")]
    NoMaximum,

    /// Iterative machinery failed to converge or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Bad run configuration (grids, ladders, file formats).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for validation, 3 for numerical trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) => 2,
            _ => 3,
        }
    }
}
