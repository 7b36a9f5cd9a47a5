//! Error type shared across the core modules.

use core::fmt;

/// Failure modes of the numerical and modeling layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// A constructor argument violates the type's invariants.
    InvalidParameter { what: &'static str, value: f64 },
    /// An operation was called outside its domain (e.g. a time before t0).
    Domain { what: &'static str, value: f64 },
    /// The adaptive refinement budget ran out before reaching tolerance.
    NonConvergence { evaluations: u64 },
    /// The integrand produced a non-finite value inside the domain.
    NonFiniteIntegrand { at: f64 },
    /// Survival mass at the queried point is below the hazard floor, or the
    /// distribution has no density there; the hazard-based quantity is
    /// undefined.
    TailUndefined { at: f64 },
    /// The requested expectation does not exist at working precision: the
    /// integrand's tail fails to decay (e.g. premium growth outpacing the
    /// arrival tail) or the distribution's mean is not finite.
    DivergentExpectation,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { what, value } => {
                write!(f, "invalid parameter: {what} (got {value})")
            }
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::NonConvergence { evaluations } => write!(
                f,
                "quadrature did not reach the requested tolerance within {evaluations} evaluations"
            ),
            Error::NonFiniteIntegrand { at } => {
                write!(f, "integrand returned a non-finite value at t = {at}")
            }
            Error::TailUndefined { at } => write!(
                f,
                "hazard undefined at t = {at}: survival below floor or no density"
            ),
            Error::DivergentExpectation => {
                write!(f, "expectation diverges: integrand tail fails to decay")
            }
        }
    }
}

impl core::error::Error for Error {}
