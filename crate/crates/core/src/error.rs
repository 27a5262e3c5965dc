use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    EndpointOutOfRange { u: usize, v: usize, n: usize },
    #[error("vertex {v} is not in 0..{n}")]
    InvalidVertex { v: usize, n: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph has loops; {0}")]
    LoopsPresent(&'static str),
    #[error("divisor length {got} does not match vertex count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("divisor is negative at vertex {0} (required nonnegative off the base vertex)")]
    NegativeOffBase(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("graph has {n} vertices, above the configured bound of {bound}")]
    SizeBound { n: usize, bound: usize },
    #[error("not an automorphism involution: {0}")]
    NotInvolution(String),
    #[error("search budget exceeded: more than {0} classes visited")]
    BudgetExceeded(u64),
    #[error("parse error: {0}")]
    Parse(String),
}
