use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tcsp_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("JSON serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("time budget of {0} s exceeded")]
    TimeBudget(u64),
}

impl CliError {
    /// Module that raised the error, as shown in error reports.
    pub fn module(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.module(),
            CliError::Io { .. } | CliError::Usage(_) | CliError::Json(_) | CliError::TimeBudget(_) => "cli",
        }
    }

    /// Short machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e {
                tcsp_core::Error::InvalidArity(_) => "invalid-arity",
                tcsp_core::Error::ArityCap { .. } => "arity-cap",
                tcsp_core::Error::UnknownRelation(_) => "unknown-relation",
                tcsp_core::Error::Signature(_) => "signature",
                tcsp_core::Error::Contract(_) => "contract",
                tcsp_core::Error::Resource { .. } => "resource",
                tcsp_core::Error::WrongFragment(_) => "wrong-fragment",
                tcsp_core::Error::Internal(_) => "internal",
                tcsp_core::Error::Parse { .. } => "parse",
            },
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Json(_) => "json",
            CliError::TimeBudget(_) => "time-budget",
        }
    }
}
