use thiserror::Error;

/// Broad failure class; drives the CLI exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Domain => 3,
            ErrorKind::Internal => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Domain => "domain",
            ErrorKind::Internal => "internal",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("pole: zeta(s) has a pole at s = 1")]
    Pole,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("singular curve: discriminant is zero")]
    Singular,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("malformed graph: {0}")]
    Graph(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Graph(_) | Error::Io(_) => ErrorKind::Parse,
            Error::Pole
            | Error::Domain(_)
            | Error::Range(_)
            | Error::Singular
            | Error::NotPrime(_) => ErrorKind::Domain,
            Error::Internal(_) => ErrorKind::Internal,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
