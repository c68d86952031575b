use thiserror::Error;

/// Library-wide error type.
///
/// `Domain` covers precondition violations (iterated log out of range,
/// forbidden residues, zero variance); `Resource` covers configured ceilings
/// (sieve limits, cell counts, search spaces). The CLI maps them to distinct
/// exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
