use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("gram matrix `{label}` is not symmetric (|G - G^T| = {asymmetry:e})")]
    NotSymmetric { label: String, asymmetry: f64 },

    #[error("gram matrix `{label}` is not positive semidefinite (eigenvalue {eigenvalue:e} below -{tol:e})")]
    NotPositiveSemidefinite { label: String, eigenvalue: f64, tol: f64 },

    #[error("seminorm `{lower}` is not dominated by `{upper}`: direction {direction:?} has excess {excess:e}")]
    Domination {
        lower: String,
        upper: String,
        direction: Vec<f64>,
        excess: f64,
    },

    #[error("operator does not vanish on the kernel of `{seminorm}`: direction {direction:?} has image norm {image_norm:e}")]
    KernelObstruction {
        seminorm: String,
        direction: Vec<f64>,
        image_norm: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    #[error("truncation level {m} exceeds system size {size}")]
    TruncationTooLarge { m: usize, size: usize },

    #[error("need at least {needed} replicas, got {got}")]
    TooFewReplicas { needed: usize, got: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
