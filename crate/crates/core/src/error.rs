use thiserror::Error;

/// Errors produced by the solvers and kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel is singular at the requested point")]
    SingularKernel,

    #[error("quadrature failed to reach tolerance {requested:e}; achieved estimate {achieved:e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("root finder failed: {0}")]
    RootFinding(String),

    #[error("optimizer did not converge: {0}")]
    OptimizerNonConvergence(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("verification gate failed: {0}")]
    GateFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
