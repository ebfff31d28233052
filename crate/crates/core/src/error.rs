use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument `{name}` = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("enumeration cap exceeded: {what} needs {needed}, cap is {cap}")]
    Cap {
        what: &'static str,
        needed: usize,
        cap: usize,
    },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        domain,
    }
}
