use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid arity {0}")]
    InvalidArity(usize),

    #[error("arity {arity} exceeds configured cap {cap}")]
    ArityCap { arity: usize, cap: usize },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("signature error: {0}")]
    Signature(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("resource limit: {what} is {got}, cap is {cap}")]
    Resource {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("instance is outside the solver's fragment: {0}")]
    WrongFragment(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Error {
    /// Module tag used by the CLI when surfacing errors.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidArity(_) | Error::ArityCap { .. } | Error::UnknownRelation(_) => {
                "order-core"
            }
            Error::Signature(_) => "ppdef-lab",
            Error::Contract(_) => "op-engine",
            Error::Resource { .. } | Error::WrongFragment(_) => "solvers",
            Error::Internal(_) => "internal",
            Error::Parse { .. } => "cli",
        }
    }
}
