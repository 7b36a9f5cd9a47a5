//! Carbon premium schedules.
//!
//! The premium is an absolute price increment per day on a share normalized
//! to 1 at `t0`, either held constant or growing geometrically. Accumulated
//! earnings use an `expm1`-based primitive so the geometric model degrades
//! smoothly into the constant one as the growth rate vanishes.

use crate::error::Error;

/// Growth rates below this switch the geometric accumulator to its exact
/// linear limit.
const LAMBDA_LINEAR_LIMIT: f64 = 1e-14;

/// Premium rate model anchored at origin `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PremiumKind {
    /// Fixed rate `p` per day.
    Constant { p: f64 },
    /// `p(s) = p0 * exp(lambda * (s - t0))`; the rate measured at `t0` is
    /// `p0`, growth is relative to the anchor rather than absolute time.
    Geometric { p0: f64, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiumModel {
    kind: PremiumKind,
    t0: f64,
}

impl PremiumModel {
    pub fn constant(p: f64, t0: f64) -> Result<Self, Error> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "premium rate must be nonnegative",
                value: p,
            });
        }
        Self::checked(PremiumKind::Constant { p }, t0)
    }

    pub fn geometric(p0: f64, lambda: f64, t0: f64) -> Result<Self, Error> {
        if !(p0.is_finite() && p0 >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "initial premium rate must be nonnegative",
                value: p0,
            });
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "premium growth rate must be nonnegative",
                value: lambda,
            });
        }
        Self::checked(PremiumKind::Geometric { p0, lambda }, t0)
    }

    fn checked(kind: PremiumKind, t0: f64) -> Result<Self, Error> {
        if !t0.is_finite() {
            return Err(Error::InvalidParameter {
                what: "t0 must be finite",
                value: t0,
            });
        }
        Ok(PremiumModel { kind, t0 })
    }

    pub fn kind(&self) -> &PremiumKind {
        &self.kind
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Premium rate at time `s` (return per day).
    pub fn rate_at(&self, s: f64) -> Result<f64, Error> {
        if s < self.t0 {
            return Err(Error::Domain {
                what: "premium rate queried before t0",
                value: s,
            });
        }
        Ok(self.rate_unchecked(s))
    }

    /// Accumulated premium A(t), the integral of the rate from `t0` to `t`.
    pub fn cumulative(&self, t: f64) -> Result<f64, Error> {
        if t < self.t0 {
            return Err(Error::Domain {
                what: "cumulative premium queried before t0",
                value: t,
            });
        }
        Ok(self.cumulative_unchecked(t))
    }

    // Domain-unchecked variants for use inside quadrature closures, which
    // only ever sample at or after t0.
    pub(crate) fn rate_unchecked(&self, s: f64) -> f64 {
        match self.kind {
            PremiumKind::Constant { p } => p,
            PremiumKind::Geometric { p0, lambda } => p0 * libm::exp(lambda * (s - self.t0)),
        }
    }

    pub(crate) fn cumulative_unchecked(&self, t: f64) -> f64 {
        let dt = t - self.t0;
        match self.kind {
            PremiumKind::Constant { p } => p * dt,
            PremiumKind::Geometric { p0, lambda } => {
                if lambda < LAMBDA_LINEAR_LIMIT {
                    p0 * dt
                } else {
                    p0 * libm::expm1(lambda * dt) / lambda
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_rate() {
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        for s in [0.0, 1.0, 750.0, 1e6] {
            assert_eq!(m.rate_at(s).unwrap(), 0.001);
        }
    }

    #[test]
    fn geometric_rate_reductions() {
        let flat = PremiumModel::geometric(0.002, 0.0, 0.0).unwrap();
        assert_eq!(flat.rate_at(500.0).unwrap(), 0.002);

        // doubling time ln(2)/lambda
        let m = PremiumModel::geometric(0.001, 0.001, 0.0).unwrap();
        let r = m.rate_at(693.147).unwrap();
        assert!((r - 0.002).abs() < 1e-9, "rate {r}");
    }

    #[test]
    fn rate_before_origin_is_domain_error() {
        let m = PremiumModel::constant(0.001, 100.0).unwrap();
        assert!(matches!(m.rate_at(99.0), Err(Error::Domain { .. })));
        assert!(matches!(m.cumulative(99.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn cumulative_examples() {
        let c = PremiumModel::constant(0.001, 0.0).unwrap();
        assert_eq!(c.cumulative(750.0).unwrap(), 0.001 * 750.0);

        let near_zero = PremiumModel::geometric(0.001, 1e-12, 0.0).unwrap();
        let v = near_zero.cumulative(750.0).unwrap();
        assert!((v - 0.75).abs() / 0.75 < 1e-9, "value {v}");

        let g = PremiumModel::geometric(0.001, 0.001, 0.0).unwrap();
        let v = g.cumulative(750.0).unwrap();
        let expected = 0.75_f64.exp_m1(); // (e^0.75 - 1), about 1.11700
        assert!((v - expected).abs() < 1e-15, "value {v}");
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(PremiumModel::constant(-0.001, 0.0).is_err());
        assert!(PremiumModel::geometric(0.001, -0.1, 0.0).is_err());
        assert!(PremiumModel::geometric(f64::NAN, 0.0, 0.0).is_err());
    }

    proptest! {
        // Central finite difference of A matches the rate.
        #[test]
        fn cumulative_derivative_matches_rate(
            t in 1.0_f64..2000.0,
            p0 in 1e-5_f64..0.01,
            lambda in 0.0_f64..0.002,
        ) {
            let m = PremiumModel::geometric(p0, lambda, 0.0).unwrap();
            let h = 1e-3;
            let fd = (m.cumulative(t + h).unwrap() - m.cumulative(t - h).unwrap()) / (2.0 * h);
            let rate = m.rate_at(t).unwrap();
            prop_assert!((fd - rate).abs() <= 1e-6 * rate.max(1e-12), "fd {fd} rate {rate}");
        }

        // Small-lambda branch agrees with the constant model. The bound
        // carries the genuine Taylor remainder lambda*t/2: with a naive
        // exp(x)-1 the cancellation noise at these magnitudes dwarfs it.
        #[test]
        fn tiny_lambda_matches_constant(
            t in 0.0_f64..5000.0,
            p0 in 1e-5_f64..0.01,
            lambda in 0.0_f64..1e-10,
        ) {
            let g = PremiumModel::geometric(p0, lambda, 0.0).unwrap();
            let c = PremiumModel::constant(p0, 0.0).unwrap();
            let gv = g.cumulative(t).unwrap();
            let cv = c.cumulative(t).unwrap();
            let rel_bound = 1e-8 + 0.51 * lambda * t;
            prop_assert!((gv - cv).abs() <= rel_bound * cv.max(1e-12));
        }

        // Nondecreasing, zero at the origin.
        #[test]
        fn cumulative_monotone(
            t1 in 0.0_f64..3000.0,
            dt in 0.0_f64..3000.0,
            p0 in 0.0_f64..0.01,
            lambda in 0.0_f64..0.003,
        ) {
            let m = PremiumModel::geometric(p0, lambda, 0.0).unwrap();
            prop_assert_eq!(m.cumulative(0.0).unwrap(), 0.0);
            prop_assert!(m.cumulative(t1 + dt).unwrap() >= m.cumulative(t1).unwrap());
        }
    }
}
