use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {quantity}")]
    NonFinite { quantity: &'static str },

    #[error("elevation angle {theta:.4} rad reached the gimbal guard")]
    GimbalLock { theta: f64 },

    #[error("trim search did not converge after {iterations} iterations (residual {residual:.3e})")]
    TrimFailure { residual: f64, iterations: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("control effectiveness matrix is rank deficient")]
    RankDeficientAllocation,

    #[error("metric window is empty")]
    EmptyMetricWindow,

    #[error("sweep does not contain the nominal baseline (degradation 1, adaptation off, healthy)")]
    MissingBaseline,

    #[error("empty telemetry")]
    EmptyTelemetry,

    #[error("aircraft hit the ground at t = {t:.3} s")]
    GroundImpact { t: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
