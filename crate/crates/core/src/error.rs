use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration step too large: trace drifted by {drift:.3e}")]
    TraceDrift { drift: f64 },

    #[error("unknown level `{0}`")]
    UnknownLevel(String),

    #[error("unknown transition `{0}`")]
    UnknownTransition(String),

    #[error("degenerate dressing parameters: rabi and detuning are both zero")]
    DegenerateDressing,

    #[error("inconsistent rotating frame: level `{0}` is reached by drives with conflicting detunings")]
    FrameConflict(String),

    #[error("schedule/register mismatch: {0}")]
    ScheduleMismatch(String),

    #[error("compilation failed: {0}")]
    Compile(String),

    #[error("singular confusion matrix (determinant {det:.3e})")]
    SingularConfusion { det: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
