use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("interface under-resolved: eps = {eps} but at least {required} is needed (2 grid spacings)")]
    UnderResolved { eps: f64, required: f64 },
    #[error("polyline self-intersects (segments {0} and {1})")]
    SelfIntersecting(usize, usize),
    #[error("solution left [-2, 2] at t = {time}: {bound}")]
    Diverged { time: f64, bound: String },
    #[error("curvature blow-up: max|kappa|*dt = {0} exceeds 0.1")]
    CurvatureBlowUp(f64),
    #[error("{what}: {failed} of {total} failed")]
    TooManyFailures { what: &'static str, failed: usize, total: usize },
    #[error("every entropy probe leaks more than the tolerated kernel mass")]
    AllProbesLeak,
    #[error("no admissible sample pair at min_sep = {0}")]
    NoAdmissiblePairs(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
