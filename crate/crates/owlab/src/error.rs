use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes:
/// configuration problems exit 1, [`Error::Domain`] and friends exit 2,
/// [`Error::Resource`] exits 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid element for this semigroup: {0}")]
    InvalidElement(String),

    #[error("invalid multiplication table: {0}")]
    InvalidTable(String),

    #[error("left division by a non-left-cancellable element has multiple solutions: {0}")]
    MultipleSolutions(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource budget exceeded: {work} work units against a budget of {budget}")]
    Resource { work: u64, budget: u64 },

    #[error("construction error: {0}")]
    Construction(String),

    #[error("certificate refused at link `{link}`: {reason}")]
    CertificateRefused { link: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
