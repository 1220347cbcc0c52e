use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not Hurwitz (max real part of spectrum {max_real_part:e})")]
    NotHurwitz { max_real_part: f64 },

    #[error("eigenvalue computation did not converge")]
    EigenFailure,

    #[error("degenerate basis: collocation system is singular or ill-conditioned (condition estimate {condition:e})")]
    DegenerateBasis { condition: f64 },

    #[error("no cut tail point found after {doublings} doublings (last T = {last_t})")]
    NoUpperBracket { doublings: usize, last_t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid switched system: {0}")]
    InvalidSystem(String),

    #[error("switching law violates the system constraints: {}", .violations.join("; "))]
    InvalidLaw { violations: Vec<String> },

    #[error("linear program failed: {0}")]
    Lp(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
