use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants map one-to-one onto the failure classes the CLI reports
/// through its exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("arithmetic mode error: {0}")]
    Mode(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("index {index} out of range (available: {available}) in {what}")]
    Range { what: &'static str, index: usize, available: usize },

    #[error("precision exhausted: about {correct_digits:.1} correct digits left at {digits}-digit precision")]
    Precision { digits: u32, correct_digits: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("degenerate {what} at n = {n}")]
    Degeneracy { what: String, n: usize },

    #[error("integration failed at t = {last_good_t}: {reason}")]
    Integration { last_good_t: String, reason: String },

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn degenerate(what: impl Into<String>, n: usize) -> Self {
        Error::Degeneracy { what: what.into(), n }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
