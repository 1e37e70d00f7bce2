//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;

use crate::network::Violation;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The element kind has no scattering description.
    UnsupportedElement(&'static str),
    /// A path record violates the path invariants.
    InvalidPath(&'static str),
    /// The network failed validation; all violations are attached.
    InvalidNetwork(Vec<Violation>),
    /// Offer propagation requires a unit-norm input; the actual norm^2 is attached.
    NonUnitInput(f64),
    /// Unknown element or port referenced by name.
    UnknownElement(String),
    /// A confirmation was requested from an element that absorbs nothing.
    NotASink(String),
    /// Every echo in the report is zero; no transaction can form.
    NoTransaction,
    /// The echo total differs from 1 beyond tolerance; the network or engine is broken.
    BrokenEchoTotal(f64),
    /// Retry probability of 1 makes the repeated protocol diverge.
    DivergentProtocol,
    /// Outcome probabilities must be non-negative and sum to 1.
    BadProbabilities(&'static str),
    /// Cycle count outside the supported range.
    BadCycleCount(u32),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::UnsupportedElement(kind) => {
                write!(f, "element kind `{kind}` has no scattering description")
            }
            Error::InvalidPath(why) => write!(f, "invalid path record: {why}"),
            Error::InvalidNetwork(violations) => {
                write!(f, "invalid network ({} violation(s)):", violations.len())?;
                for v in violations {
                    write!(f, "\n  {v}")?;
                }
                Ok(())
            }
            Error::NonUnitInput(norm2) => {
                write!(f, "input polarization norm^2 = {norm2}, expected 1")
            }
            Error::UnknownElement(id) => write!(f, "unknown element `{id}`"),
            Error::NotASink(id) => write!(f, "element `{id}` is not an absorbing sink"),
            Error::NoTransaction => write!(f, "all echoes are zero; no transaction can form"),
            Error::BrokenEchoTotal(total) => {
                write!(f, "echo total {total} deviates from 1 beyond 1e-6")
            }
            Error::DivergentProtocol => write!(f, "retry probability 1 never terminates"),
            Error::BadProbabilities(why) => write!(f, "bad outcome probabilities: {why}"),
            Error::BadCycleCount(n) => write!(f, "cycle count {n} out of range"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
