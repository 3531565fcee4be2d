use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("complement undefined at working precision: {0}")]
    ComplementUndefined(String),

    #[error("grid size {0} rejected: N must be even and at least 8")]
    GridSize(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("missing parameter `{0}`")]
    MissingParam(String),

    #[error("bad parameter `{field}`: {reason}")]
    BadParam { field: String, reason: String },

    #[error("{0}")]
    Inapplicable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn bad(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::BadParam {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
