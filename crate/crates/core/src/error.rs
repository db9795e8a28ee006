use thiserror::Error;

/// Errors produced by the simulation, rewrite and analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rule not applicable: {0}")]
    RuleNotApplicable(String),

    #[error("no crossing between sizes {n_small} and {n_large}")]
    NoCrossing { n_small: usize, n_large: usize },

    #[error("fit unbounded: {0}")]
    FitUnbounded(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("dense evaluation refused: {0}")]
    TooLarge(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn not_applicable(msg: impl Into<String>) -> Self {
        Error::RuleNotApplicable(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
