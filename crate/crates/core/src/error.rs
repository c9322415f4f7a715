use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates a stated constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The landmark lies on or behind the camera image plane.
    #[error("landmark depth {depth} mm is not positive")]
    UndefinedDepth { depth: f64 },

    #[error("camera position coincides with landmark {index}")]
    DegenerateGeometry { index: usize },

    #[error("chromosome length mismatch: expected {expected} genes, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty input")]
    EmptyInput,

    #[error("expected count {min_expected:.3} in a contingency cell is below 5")]
    InsufficientExpectedCount { min_expected: f64 },

    #[error("trajectory leaves the reachable region at t = {t:.3} s (position {position:?} cm)")]
    TrajectoryOutOfRegion { t: f64, position: [f64; 3] },

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
