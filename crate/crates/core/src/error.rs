use alloc::string::String;
use core::fmt;

use crate::model::ValueFunction;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two arrays that must agree in length do not.
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A flat array does not match the extents implied by the model shape.
    ExtentMismatch {
        array: &'static str,
        expected: usize,
        found: usize,
    },
    /// The model violates one of its standing assumptions.
    InvalidModel(String),
    InvalidParameter(String),
    /// A probability vector is negative somewhere or does not sum to one.
    InvalidDistribution(String),
    /// No minorization certificate exists for the model.
    MissingCertificate,
    /// An iteration hit its cap before reaching the requested tolerance.
    /// `best` is the iterate with the smallest residual seen.
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: ValueFunction,
    },
    /// The brute-force oracle refused an instance that is too large.
    GuardExceeded { work: u128, limit: u128 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch {
                what,
                expected,
                found,
            } => write!(f, "length mismatch for {what}: expected {expected}, found {found}"),
            Error::ExtentMismatch {
                array,
                expected,
                found,
            } => write!(
                f,
                "extent mismatch in `{array}`: expected {expected} entries, found {found}"
            ),
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::MissingCertificate => {
                write!(f, "no minorization certificate exists for this model")
            }
            Error::NoConvergence {
                iterations,
                residual,
                ..
            } => write!(
                f,
                "no convergence after {iterations} iterations (residual {residual:e})"
            ),
            Error::GuardExceeded { work, limit } => write!(
                f,
                "instance too large for the brute-force oracle ({work} > {limit})"
            ),
        }
    }
}

impl core::error::Error for Error {}

/// Non-fatal conditions surfaced alongside a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// The model has no minorization certificate; contraction and the
    /// Banach stopping rule are unavailable.
    MissingCertificate,
    /// The stationary equilibrium at `state` is not unique; the canonical
    /// pair was used.
    TiedEquilibrium { state: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::MissingCertificate => write!(
                f,
                "no minorization certificate: result is uncertified (contraction guarantee unavailable)"
            ),
            Warning::TiedEquilibrium { state } => write!(
                f,
                "equilibrium at state {state} is not unique; canonical pair used"
            ),
        }
    }
}
