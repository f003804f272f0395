use thiserror::Error;

/// Errors raised by machine construction, evaluation and parsing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("divergent epsilon mass: {0}")]
    DivergentEpsilon(String),
    #[error("step cap {cap} exceeded after {} transitions", partial.len())]
    Truncated { cap: usize, partial: Vec<usize> },
    #[error("reachable state count exceeded the guard of {0}")]
    StateGuard(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("attention argmax is not unique at position {position}")]
    AmbiguousAttention { position: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Invalid(_) => "invalid-machine",
            Error::InvalidAlphabet(_) => "invalid-alphabet",
            Error::AlphabetMismatch(_) => "alphabet-mismatch",
            Error::UnknownSymbol(_) => "unknown-symbol",
            Error::DivergentEpsilon(_) => "divergent-epsilon-mass",
            Error::Truncated { .. } => "truncated",
            Error::StateGuard(_) => "state-guard",
            Error::Dimension(_) => "dimension-mismatch",
            Error::AmbiguousAttention { .. } => "ambiguous-attention",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
