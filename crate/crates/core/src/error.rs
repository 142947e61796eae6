use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("grid size {0} is not a power of two (or is < 2)")]
    BadGridSize(usize),

    #[error("periodic wrap risk: t_max {t_max} needs x_max >= {min_x_max}")]
    WrapRisk { t_max: f64, min_x_max: f64 },

    #[error("dense oracle infeasible: n*d_s = {0} exceeds 512")]
    DenseTooLarge(usize),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("no records to write")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
