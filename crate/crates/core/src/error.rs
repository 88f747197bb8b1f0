use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("surface mismatch: expected a vector of length {expected}, found {found}")]
    SurfaceMismatch { expected: usize, found: usize },
    #[error("unknown boundary component {0}")]
    UnknownBoundary(String),
    #[error("curve {name} is undefined on {surface}: {reason}")]
    UndefinedCurve { name: String, surface: String, reason: String },
    #[error("class is not certified as a simple closed curve")]
    Uncertified,
    #[error("index {index} out of range for a word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cyclic permutation needs a central target")]
    NonCentralTarget,
    #[error("relator check failed: {0}")]
    Relator(String),
    #[error("subword mismatch at {position}: {detail}")]
    SubwordMismatch { position: usize, detail: String },
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("step {step} ({kind}) failed: {detail}")]
    Step { step: usize, kind: String, detail: String },
    #[error("not a pencil factorization: {0}")]
    NotPencil(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
