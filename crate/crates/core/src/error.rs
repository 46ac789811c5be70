use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field is corrupted: {0}")]
    CorruptedField(String),

    /// An iterative method stopped before meeting its tolerance. The last
    /// iterate is kept so the caller can inspect or restart from it.
    #[error("{method} did not converge after {iterations} iterations (last value {last_value})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        last_value: f64,
        last_iterate: Vec<f64>,
    },

    #[error("tridiagonal solve broke down at row {row} (pivot {pivot})")]
    SolverBreakdown { row: usize, pivot: f64 },

    #[error("step limit of {0} reached before the horizon")]
    StepLimit(usize),
}
