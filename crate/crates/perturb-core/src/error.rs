use thiserror::Error;

/// Errors shared by the linear-algebra and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {bound:.3e}")]
    NotHermitian { deviation: f64, bound: f64 },

    #[error("matrix is not unitary: deviation {deviation:.3e} exceeds {bound:.3e}")]
    NotUnitary { deviation: f64, bound: f64 },

    #[error(
        "eigensolver did not converge after {sweeps} sweeps: off-diagonal mass {off_norm:.3e}, target {target:.3e}"
    )]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        target: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectrum kind mismatch: function expects {expected} arguments, eigensystem provides {found}")]
    DomainMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("capability exceeded: {0}")]
    Capability(String),
}

pub type Result<T> = std::result::Result<T, Error>;
