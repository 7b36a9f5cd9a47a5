//! SETR values and curves.
//!
//! Under the weak no-arbitrage condition the expected cumulative premium
//! equals the expected single-event loss, which for a constant premium
//! collapses to `phi = p * (E(T) - t0)`. The expected premium earnings are
//! evaluated as the single integral of `rate(s) * survival(s)` — the
//! order-of-integration swap of the nested double integral, which is kept
//! around only as a brute-force test oracle. The strong condition, enforced
//! conditionally at every future time, pins the whole curve
//! `phi(t') = p * survival(t') / pdf(t') = p / hazard(t')`.

use alloc::vec::Vec;

use crate::arrival::{ArrivalKind, ArrivalProcess};
use crate::error::Error;
use crate::premium::{PremiumKind, PremiumModel};
use crate::quad;
use crate::Tolerances;

/// How a [`SetrResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetrMethod {
    WeakConstant,
    GeometricPremium,
    StrongCurvePoint,
    ResidualCheck,
    ExpectedEarnings,
}

/// A single SETR (or residual) value in price units of the share at `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetrResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: SetrMethod,
}

/// Strong no-arbitrage SETR evaluated over a time grid.
///
/// Grid points where the hazard is undefined (survival at the floor, or a
/// vanished density) are omitted from `grid`/`values` and listed in
/// `skipped`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetrCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub skipped: Vec<f64>,
}

fn require_nonnegative_rate(what: &'static str, p: f64) -> Result<(), Error> {
    if p.is_finite() && p >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what, value: p })
    }
}

fn require_same_origin(a: &ArrivalProcess, m: &PremiumModel) -> Result<(), Error> {
    if a.t0() == m.t0() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "arrival and premium must share the same origin t0",
            value: m.t0() - a.t0(),
        })
    }
}

// Geometric premium against an exponential tail has a closed-form
// convergence condition; other families are covered by the numerical
// decay probe inside the half-line integrator.
fn check_exponential_divergence(a: &ArrivalProcess, m: &PremiumModel) -> Result<(), Error> {
    if let (ArrivalKind::Exponential { scale }, PremiumKind::Geometric { lambda, .. }) =
        (a.kind(), m.kind())
    {
        if lambda * scale >= 1.0 {
            return Err(Error::DivergentExpectation);
        }
    }
    Ok(())
}

/// Expected cumulative premium earned until the event, `E[A(T)]`.
pub fn expected_premium_earnings(
    a: &ArrivalProcess,
    m: &PremiumModel,
    tol: &Tolerances,
) -> Result<SetrResult, Error> {
    tol.validate()?;
    require_same_origin(a, m)?;
    check_exponential_divergence(a, m)?;

    if let ArrivalKind::PointMass { event_time } = a.kind() {
        return Ok(SetrResult {
            value: m.cumulative(*event_time)?,
            abs_error_estimate: 0.0,
            method: SetrMethod::ExpectedEarnings,
        });
    }

    let r = quad::integrate_halfline(
        |s| m.rate_unchecked(s) * a.survival(s),
        a.t0(),
        a.truncation_time(tol.tail_cutoff),
        a.breakpoints(),
        tol.rel_tol,
        tol.max_evaluations,
    )?;
    Ok(SetrResult {
        value: r.value,
        abs_error_estimate: r.abs_error_estimate,
        method: SetrMethod::ExpectedEarnings,
    })
}

/// Constant SETR under the weak no-arbitrage condition:
/// `phi = p * (E(T) - t0)`.
pub fn setr_weak_constant(
    a: &ArrivalProcess,
    p: f64,
    tol: &Tolerances,
) -> Result<SetrResult, Error> {
    tol.validate()?;
    require_nonnegative_rate("premium rate must be nonnegative", p)?;
    let mean = a.mean_with_estimate(tol)?;
    Ok(SetrResult {
        value: p * (mean.value - a.t0()),
        abs_error_estimate: p * mean.abs_error_estimate,
        method: SetrMethod::WeakConstant,
    })
}

/// Constant SETR for a geometrically growing premium:
/// `phi = integral of pdf(t) * A(t) dt` with the stable accumulator.
pub fn setr_geometric(
    a: &ArrivalProcess,
    p0: f64,
    lambda: f64,
    tol: &Tolerances,
) -> Result<SetrResult, Error> {
    tol.validate()?;
    let m = PremiumModel::geometric(p0, lambda, a.t0())?;
    check_exponential_divergence(a, &m)?;

    if let ArrivalKind::PointMass { event_time } = a.kind() {
        return Ok(SetrResult {
            value: m.cumulative(*event_time)?,
            abs_error_estimate: 0.0,
            method: SetrMethod::GeometricPremium,
        });
    }

    let r = quad::integrate_halfline(
        |t| a.pdf(t) * m.cumulative_unchecked(t),
        a.t0(),
        a.truncation_time(tol.tail_cutoff),
        a.breakpoints(),
        tol.rel_tol,
        tol.max_evaluations,
    )?;
    Ok(SetrResult {
        value: r.value,
        abs_error_estimate: r.abs_error_estimate,
        method: SetrMethod::GeometricPremium,
    })
}

/// Strong no-arbitrage SETR curve `phi(t') = p / hazard(t')` over `grid`.
///
/// The grid must be strictly increasing and start at or after `t0`.
pub fn setr_strong_curve(
    a: &ArrivalProcess,
    p: f64,
    grid: &[f64],
    tol: &Tolerances,
) -> Result<SetrCurve, Error> {
    tol.validate()?;
    require_nonnegative_rate("premium rate must be nonnegative", p)?;
    if grid.is_empty() {
        return Err(Error::Domain {
            what: "strong-curve grid must be non-empty",
            value: 0.0,
        });
    }
    for &t in grid {
        if !t.is_finite() {
            return Err(Error::Domain {
                what: "strong-curve grid must be finite",
                value: t,
            });
        }
    }
    for w in grid.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::Domain {
                what: "strong-curve grid must be strictly increasing",
                value: w[1],
            });
        }
    }
    if grid[0] < a.t0() {
        return Err(Error::Domain {
            what: "strong-curve grid must start at or after t0",
            value: grid[0],
        });
    }

    let mut kept = Vec::new();
    let mut values = Vec::new();
    let mut skipped = Vec::new();
    for &t in grid {
        match a.hazard(t, tol.hazard_floor) {
            Ok(h) => {
                let phi = p / h;
                if h > 0.0 && phi.is_finite() {
                    kept.push(t);
                    values.push(phi);
                } else {
                    skipped.push(t);
                }
            }
            Err(Error::TailUndefined { .. }) => skipped.push(t),
            Err(e) => return Err(e),
        }
    }
    Ok(SetrCurve {
        grid: kept,
        values,
        skipped,
    })
}

/// Signed residual of the weak no-arbitrage identity for a constant SETR:
/// expected premium earnings minus `phi_const`; zero exactly when the
/// identity holds.
pub fn noarb_residual(
    a: &ArrivalProcess,
    m: &PremiumModel,
    phi_const: f64,
    tol: &Tolerances,
) -> Result<SetrResult, Error> {
    if !phi_const.is_finite() {
        return Err(Error::InvalidParameter {
            what: "phi must be finite",
            value: phi_const,
        });
    }
    let earnings = expected_premium_earnings(a, m, tol)?;
    Ok(SetrResult {
        value: earnings.value - phi_const,
        abs_error_estimate: earnings.abs_error_estimate,
        method: SetrMethod::ResidualCheck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn exp750() -> ArrivalProcess {
        ArrivalProcess::exponential(750.0, 0.0).unwrap()
    }

    /// Brute-force oracle for E[A(T)]: the nested double integral evaluated
    /// as a midpoint Riemann sum, with the inner premium integral itself
    /// accumulated numerically. Independent of both the order-swap route
    /// and the closed-form accumulator.
    fn riemann_expected_earnings(a: &ArrivalProcess, m: &PremiumModel, dt: f64) -> f64 {
        let t0 = a.t0();
        let t_end = a.truncation_time(1e-10);
        let steps = ((t_end - t0) / dt).ceil() as u64;
        let mut inner_acc = 0.0; // premium accumulated to the left edge
        let mut total = 0.0;
        for k in 0..steps {
            let mid = t0 + (k as f64 + 0.5) * dt;
            let a_mid = inner_acc + m.rate_at(mid).unwrap() * (dt / 2.0);
            total += a.pdf(mid) * a_mid * dt;
            inner_acc += m.rate_at(mid).unwrap() * dt;
        }
        total
    }

    #[test]
    fn expected_earnings_examples() {
        let c = PremiumModel::constant(0.001, 0.0).unwrap();
        let r = expected_premium_earnings(&exp750(), &c, &tol()).unwrap();
        assert!((r.value - 0.75).abs() / 0.75 < 1e-6, "value {}", r.value);

        let pm = ArrivalProcess::point_mass(300.0, 0.0).unwrap();
        let r = expected_premium_earnings(&pm, &c, &tol()).unwrap();
        assert_eq!(r.value, 0.30);
        assert_eq!(r.abs_error_estimate, 0.0);

        let g = PremiumModel::geometric(0.001, 0.001, 0.0).unwrap();
        let r = expected_premium_earnings(&exp750(), &g, &tol()).unwrap();
        assert!((r.value - 3.0).abs() / 3.0 < 1e-6, "value {}", r.value);
    }

    #[test]
    fn expected_earnings_matches_nested_oracle() {
        let cases: [(ArrivalProcess, PremiumModel); 3] = [
            (exp750(), PremiumModel::constant(0.001, 0.0).unwrap()),
            (
                ArrivalProcess::weibull(2.0, 500.0, 0.0).unwrap(),
                PremiumModel::geometric(0.002, 0.0005, 0.0).unwrap(),
            ),
            (
                ArrivalProcess::log_normal(5.5, 0.5, 0.0).unwrap(),
                PremiumModel::constant(0.003, 0.0).unwrap(),
            ),
        ];
        for (a, m) in &cases {
            let fast = expected_premium_earnings(a, m, &tol()).unwrap().value;
            let slow = riemann_expected_earnings(a, m, 0.01);
            assert!(
                (fast - slow).abs() / slow.abs() < 1e-4,
                "fast {fast} slow {slow}"
            );
        }
    }

    #[test]
    fn weak_constant_examples() {
        let r = setr_weak_constant(&exp750(), 0.001, &tol()).unwrap();
        assert!((r.value - 0.75).abs() / 0.75 < 1e-6);
        assert_eq!(r.method, SetrMethod::WeakConstant);

        let r = setr_weak_constant(&exp750(), 0.0, &tol()).unwrap();
        assert_eq!(r.value, 0.0);

        let pm = ArrivalProcess::point_mass(430.0, 100.0).unwrap();
        let r = setr_weak_constant(&pm, 0.002, &tol()).unwrap();
        assert_eq!(r.value, 0.002 * 330.0);
    }

    #[test]
    fn geometric_examples() {
        let r = setr_geometric(&exp750(), 0.001, 1e-12, &tol()).unwrap();
        let weak = setr_weak_constant(&exp750(), 0.001, &tol()).unwrap();
        assert!((r.value - weak.value).abs() / weak.value < 1e-8);

        let r = setr_geometric(&exp750(), 0.001, 0.001, &tol()).unwrap();
        assert!((r.value - 3.0).abs() / 3.0 < 1e-6, "value {}", r.value);

        let pm = ArrivalProcess::point_mass(750.0, 0.0).unwrap();
        let r = setr_geometric(&pm, 0.001, 0.001, &tol()).unwrap();
        let expected = 0.75_f64.exp_m1();
        assert!((r.value - expected).abs() < 1e-15);
    }

    #[test]
    fn geometric_divergence_detected() {
        // Exponential: closed-form threshold lambda >= 1/scale.
        let err = setr_geometric(&exp750(), 0.001, 1.0 / 750.0, &tol()).unwrap_err();
        assert!(matches!(err, Error::DivergentExpectation));

        // Sub-exponential tails cannot outrun any growing premium; caught by
        // the numerical decay probe.
        let heavy = ArrivalProcess::weibull(0.8, 400.0, 0.0).unwrap();
        let err = setr_geometric(&heavy, 0.001, 0.01, &tol()).unwrap_err();
        assert!(matches!(err, Error::DivergentExpectation));

        let ln = ArrivalProcess::log_normal(5.0, 0.5, 0.0).unwrap();
        let err = setr_geometric(&ln, 0.001, 0.01, &tol()).unwrap_err();
        assert!(matches!(err, Error::DivergentExpectation));
    }

    #[test]
    fn strong_curve_examples() {
        let grid: Vec<f64> = (0..100).map(|i| i as f64 * 20.0).collect();
        let curve = setr_strong_curve(&exp750(), 0.001, &grid, &tol()).unwrap();
        assert_eq!(curve.values.len(), grid.len());
        let lo = curve.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = curve
            .values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo <= 1e-10, "spread {}", hi - lo);
        assert!((curve.values[0] - 0.75).abs() < 1e-12);

        let w = ArrivalProcess::weibull(2.0, 500.0, 0.0).unwrap();
        let curve = setr_strong_curve(&w, 0.001, &[500.0], &tol()).unwrap();
        assert!((curve.values[0] - 0.25).abs() < 1e-12);

        let curve = setr_strong_curve(&exp750(), 0.0, &grid, &tol()).unwrap();
        assert!(curve.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn strong_curve_skips_undefined_points() {
        let pm = ArrivalProcess::point_mass(300.0, 0.0).unwrap();
        let curve = setr_strong_curve(&pm, 0.001, &[100.0, 400.0], &tol()).unwrap();
        assert!(curve.grid.is_empty());
        assert_eq!(curve.skipped, alloc::vec![100.0, 400.0]);

        let err = setr_strong_curve(&exp750(), 0.001, &[], &tol()).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
        let err = setr_strong_curve(&exp750(), 0.001, &[5.0, 5.0], &tol()).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn residual_examples() {
        let c = PremiumModel::constant(0.001, 0.0).unwrap();
        let r = noarb_residual(&exp750(), &c, 0.75, &tol()).unwrap();
        assert!(r.value.abs() < 1e-8, "residual {}", r.value);

        let zero = PremiumModel::constant(0.0, 0.0).unwrap();
        let r = noarb_residual(&exp750(), &zero, 0.0, &tol()).unwrap();
        assert_eq!(r.value, 0.0);

        let r = noarb_residual(&exp750(), &c, 1.0, &tol()).unwrap();
        assert!((r.value + 0.25).abs() < 1e-8, "residual {}", r.value);
    }

    #[test]
    fn weak_constant_is_exactly_linear_in_p() {
        for p in [1e-4, 0.001, 0.0123] {
            let one = setr_weak_constant(&exp750(), p, &tol()).unwrap();
            let two = setr_weak_constant(&exp750(), 2.0 * p, &tol()).unwrap();
            assert_eq!(two.value, 2.0 * one.value);
        }
    }

    #[test]
    fn strong_curve_monotone_with_hazard_shape() {
        let grid: Vec<f64> = (1..80).map(|i| i as f64 * 25.0).collect();
        let increasing_hazard = ArrivalProcess::weibull(2.0, 500.0, 0.0).unwrap();
        let curve = setr_strong_curve(&increasing_hazard, 0.001, &grid, &tol()).unwrap();
        assert!(curve.values.windows(2).all(|w| w[1] < w[0]));

        let decreasing_hazard = ArrivalProcess::weibull(0.6, 500.0, 0.0).unwrap();
        let curve = setr_strong_curve(&decreasing_hazard, 0.001, &grid, &tol()).unwrap();
        assert!(curve.values.windows(2).all(|w| w[1] > w[0]));
    }

    proptest! {
        // Fubini: the weak-constant formula and the expected-earnings
        // integral are the same number for constant premiums.
        #[test]
        fn weak_equals_expected_earnings(
            scale in 50.0_f64..1500.0,
            p in 1e-5_f64..0.01,
            pick in 0_u8..3,
        ) {
            let a = match pick {
                0 => ArrivalProcess::exponential(scale, 0.0).unwrap(),
                1 => ArrivalProcess::weibull(1.5, scale, 0.0).unwrap(),
                _ => ArrivalProcess::log_normal(libm::log(scale), 0.5, 0.0).unwrap(),
            };
            let m = PremiumModel::constant(p, 0.0).unwrap();
            let weak = setr_weak_constant(&a, p, &tol()).unwrap();
            let earn = expected_premium_earnings(&a, &m, &tol()).unwrap();
            let slack = 2.0 * (weak.abs_error_estimate + earn.abs_error_estimate)
                + 1e-12 * weak.value.abs();
            prop_assert!(
                (weak.value - earn.value).abs() <= slack,
                "weak {} earn {} slack {}", weak.value, earn.value, slack
            );
        }

        // Memorylessness: the strong curve of an exponential is flat at the
        // weak-constant value.
        #[test]
        fn exponential_strong_curve_is_flat(
            scale in 50.0_f64..1500.0,
            p in 1e-5_f64..0.01,
        ) {
            let a = ArrivalProcess::exponential(scale, 0.0).unwrap();
            let grid: alloc::vec::Vec<f64> = (0..50).map(|i| i as f64 * scale / 10.0).collect();
            let curve = setr_strong_curve(&a, p, &grid, &tol()).unwrap();
            let weak = setr_weak_constant(&a, p, &tol()).unwrap();
            for v in &curve.values {
                prop_assert!((v - p * scale).abs() <= 1e-10 * (1.0 + p * scale));
                prop_assert!((v - weak.value).abs() <= 1e-8 * (1.0 + weak.value.abs()));
            }
        }

        // lambda -> 0 continuity of the geometric SETR.
        #[test]
        fn geometric_lambda_to_zero(
            scale in 50.0_f64..1500.0,
            p0 in 1e-5_f64..0.01,
        ) {
            let a = ArrivalProcess::exponential(scale, 0.0).unwrap();
            let geo = setr_geometric(&a, p0, 1e-12, &tol()).unwrap();
            let weak = setr_weak_constant(&a, p0, &tol()).unwrap();
            prop_assert!((geo.value - weak.value).abs() <= 1e-8 * weak.value.abs());
        }
    }
}
