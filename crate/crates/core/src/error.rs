use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("{what} index {index} out of range 1..={len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The divisor-set machinery is defined for N <= M; larger transmit
    /// arrays must swap the roles of transmitter and receiver first.
    #[error("N = {n} exceeds M = {m}; swap transmitter and receiver roles first")]
    SwapRequired { m: usize, n: usize },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("computation failed: {0}")]
    Computation(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Computation(_))
    }
}
