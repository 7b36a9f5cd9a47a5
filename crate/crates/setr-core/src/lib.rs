//! Core library for pricing single-event transition risk (SETR).
//!
//! A carbon-exposed share earns a premium while it waits for a transition
//! event that wipes out its carbon-linked value in one shock. Given the
//! premium schedule and the arrival distribution of the event, the
//! no-arbitrage condition pins down the size of that one-shot loss. This
//! crate provides the pieces needed to compute it and to check it against
//! an independent Monte Carlo market:
//!
//! * [`quad`] — adaptive Gauss–Kronrod quadrature on finite intervals and
//!   truncated half-lines,
//! * [`arrival`] — event-arrival distributions with pdf/cdf/survival/hazard,
//!   expectations and reproducible inverse-CDF sampling,
//! * [`premium`] — premium rate models and their accumulated earnings,
//! * [`setr`] — the risk values themselves: constant, geometric-premium and
//!   conditional (curve) variants plus the no-arbitrage residual,
//! * [`market`] — a paired-path geometric-Brownian-motion simulator of the
//!   hypothetical single-event market.
//!
//! The crate is `no_std` (with `alloc`); all IO, serialization and the CLI
//! live in the companion `setr-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arrival;
pub mod error;
pub mod market;
mod math;
pub mod premium;
pub mod quad;
pub mod rng;
pub mod setr;

pub use arrival::{ArrivalKind, ArrivalProcess, RiskProcessSample};
pub use error::Error;
pub use market::{MarketParams, McReport, PremiumApplication, SimOptions, SimulationPath};
pub use premium::PremiumModel;
pub use quad::QuadratureResult;
pub use setr::{SetrCurve, SetrMethod, SetrResult};

/// Numerical policy shared by every integrating operation.
///
/// The defaults are deliberately far below Monte Carlo noise for the
/// problem sizes this crate targets; configuration files may override them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance requested from adaptive quadrature.
    pub rel_tol: f64,
    /// Survival mass allowed beyond the half-line truncation point.
    pub tail_cutoff: f64,
    /// Survival values at or below this floor make the hazard undefined.
    pub hazard_floor: f64,
    /// Integrand-evaluation budget per quadrature call.
    pub max_evaluations: u64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: 1e-8,
            tail_cutoff: 1e-12,
            hazard_floor: 1e-300,
            max_evaluations: 1_000_000,
        }
    }
}

impl Tolerances {
    /// Validates the ranges the numerical layer assumes.
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter {
                what: "rel_tol must lie in (0, 1)",
                value: self.rel_tol,
            });
        }
        if !(self.tail_cutoff > 0.0 && self.tail_cutoff <= 1e-6) {
            return Err(Error::InvalidParameter {
                what: "tail_cutoff must lie in (0, 1e-6]",
                value: self.tail_cutoff,
            });
        }
        if self.hazard_floor.is_nan() || self.hazard_floor <= 0.0 {
            return Err(Error::InvalidParameter {
                what: "hazard_floor must be positive",
                value: self.hazard_floor,
            });
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidParameter {
                what: "max_evaluations must be positive",
                value: 0.0,
            });
        }
        Ok(())
    }
}
