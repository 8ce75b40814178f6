use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong dimensions, lengths, empty collections.
    #[error("input error: {0}")]
    Input(String),
    /// A mathematical hypothesis of the requested bound does not hold.
    #[error("domain error: {0}")]
    Domain(String),
    /// The exact solver was asked to handle more than it is configured for.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// A non-finite value appeared during a forward pass.
    #[error("numeric error in layer {layer}: {message}")]
    Numeric { layer: usize, message: String },
    /// A claimed Lipschitz constant or cover did not survive verification.
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    /// The requested combination of rate families has no matching result.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
