use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("invalid parameter: {0}")]
    BadParams(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("decoding failure: {0}")]
    DecodeFailure(String),

    #[error("ambiguous decoding: codewords {0} and {1} are equidistant")]
    Ambiguous(usize, usize),

    #[error("certification failure: {0}")]
    CertificationFailure(String),

    #[error("construction attempts exhausted after {0} tries")]
    AttemptsExhausted(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
