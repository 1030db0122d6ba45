use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A pivot of the orthogonal factorization fell below the rank tolerance.
    /// `column` indexes the offending column of the factored matrix.
    #[error("singular design: column {column} is (numerically) a linear combination of the others")]
    RankDeficient { column: usize },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} is undefined: {reason}")]
    Undefined { what: &'static str, reason: String },

    #[error("invalid population: {}", .0.join("; "))]
    InvalidPopulation(Vec<String>),

    #[error("combinatorial budget exceeded: {pairs} (sample, assignment) pairs exceed the limit of {limit}")]
    BudgetExceeded { pairs: u128, limit: u128 },

    #[error("all {reps} Monte Carlo draws were degenerate")]
    AllDegenerate { reps: u64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a singular or rank-deficient system.
    pub fn is_singular(&self) -> bool {
        matches!(self, Error::RankDeficient { .. } | Error::Singular(_))
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
