use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Model,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}: date {date} does not follow the previous bar")]
    NonMonotoneDates { line: u64, date: NaiveDate },

    #[error("bar {date}: {message}")]
    InvalidBar { date: NaiveDate, message: String },

    #[error("empty input")]
    Empty,

    #[error("fetch failed: {0}")]
    Fetch(String),

    #[error("fetch returned HTTP status {0}")]
    HttpStatus(u16),

    #[error("series too short: need at least {needed} points, got {actual}")]
    TooShort { needed: usize, actual: usize },

    #[error("column {0} is constant and cannot be scaled")]
    ConstantColumn(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch}")]
    Diverged { epoch: usize },

    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),

    #[error("optimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NoConvergence { iterations: usize, gradient_norm: f64 },

    #[error("symbol {symbol} at position {position} has zero probability under every state")]
    ZeroProbability { position: usize, symbol: usize },

    #[error("search needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },

    #[error("model file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::BudgetExceeded { .. } => ErrorKind::Config,
            Error::MalformedRow { .. }
            | Error::NonMonotoneDates { .. }
            | Error::InvalidBar { .. }
            | Error::Empty
            | Error::Fetch(_)
            | Error::HttpStatus(_)
            | Error::TooShort { .. }
            | Error::ConstantColumn(_)
            | Error::Format(_)
            | Error::Io(_) => ErrorKind::Data,
            Error::Dimension(_)
            | Error::NonFinite(_)
            | Error::Diverged { .. }
            | Error::IllConditioned(_)
            | Error::NoConvergence { .. }
            | Error::ZeroProbability { .. } => ErrorKind::Model,
        }
    }
}
