use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Error categories shared by every module. The CLI maps them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad vertex, bad file, bad matrix).
    #[error("input error: {0}")]
    Input(String),

    /// Request exceeds a hard size limit (dense state, oracle, exhaustive search).
    #[error("capability error: {0}")]
    Capability(String),

    /// Invalid operation on a quantum state (e.g. re-measuring a pinned qubit).
    #[error("state error: {0}")]
    State(String),

    /// Protocol or source configuration violates a precondition.
    #[error("config error: {0}")]
    Config(String),

    /// A state source could not produce the requested copy.
    #[error("source error: {0}")]
    Source(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code: 3 for capability limits, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capability(_) => 3,
            _ => 2,
        }
    }
}
