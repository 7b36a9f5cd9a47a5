//! Monte Carlo simulator of the hypothetical single-event market.
//!
//! Each path pairs a risk-free share with a carbon-exposed share driven by
//! the same Brownian noise. The carbon share accrues the premium on top of
//! the risk-free price and, at its (per-path) transition time, loses the
//! SETR in one exact subtraction. Per-path randomness is keyed entirely by
//! `(master_seed, path_index)`, so any execution schedule reproduces the
//! same numbers.

use alloc::vec::Vec;

use crate::arrival::ArrivalProcess;
use crate::error::Error;
use crate::premium::PremiumModel;
use crate::rng::{derive_seed, UniformStream};

/// Geometric Brownian motion parameters and the simulation clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Drift per day.
    pub mu: f64,
    /// Volatility per sqrt(day).
    pub sigma: f64,
    /// Initial price; the framework normalizes to 1 at t0.
    pub s0: f64,
    /// Days per step.
    pub dt: f64,
    /// Simulated span in days (from t0).
    pub horizon: f64,
    /// Master seed; per-path streams derive from it.
    pub master_seed: u64,
}

impl MarketParams {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter {
                what: "sigma must be nonnegative",
                value: self.sigma,
            });
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter {
                what: "mu must be finite",
                value: self.mu,
            });
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter {
                what: "dt must be positive",
                value: self.dt,
            });
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return Err(Error::InvalidParameter {
                what: "horizon must cover at least one step",
                value: self.horizon,
            });
        }
        if !(self.s0.is_finite() && self.s0 > 0.0) {
            return Err(Error::InvalidParameter {
                what: "s0 must be positive",
                value: self.s0,
            });
        }
        Ok(())
    }

    fn steps(&self) -> u64 {
        (self.horizon / self.dt + 1e-9) as u64
    }
}

/// How the premium enters the carbon path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PremiumApplication {
    /// Add the accumulated premium to the price level (default): the carbon
    /// price is the risk-free price plus A(t), matching the additive
    /// bookkeeping of the no-arbitrage identities.
    AdditiveLevel,
    /// Fold the instantaneous rate into the drift instead; sensitivity runs
    /// only.
    DriftAdjusted,
}

/// Simulation switches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub premium_application: PremiumApplication,
    /// Clamp the carbon price at zero after the shock (display runs); the
    /// default keeps the raw subtraction, negative values included.
    pub clamp_at_zero: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            premium_application: PremiumApplication::AdditiveLevel,
            clamp_at_zero: false,
        }
    }
}

/// One simulated pair of price paths and its transition time.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPath {
    pub times: Vec<f64>,
    pub riskfree: Vec<f64>,
    pub carbon: Vec<f64>,
    /// Transition time drawn for this path; may lie beyond the horizon.
    pub transition_time: f64,
    pub phi_applied: f64,
}

/// Aggregates of a Monte Carlo run of the no-arbitrage check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub n_paths: u64,
    /// Mean premium accumulated until each path's transition.
    pub mean_premium_earned: f64,
    pub se_premium: f64,
    /// Mean single-event loss; the event is a surety, so this is phi.
    pub mean_loss: f64,
    pub se_loss: f64,
    /// mean_premium_earned - mean_loss.
    pub residual: f64,
    pub fraction_transitioned_in_horizon: f64,
}

fn check_phi(phi: f64) -> Result<(), Error> {
    if phi.is_finite() && phi >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "phi must be nonnegative and finite",
            value: phi,
        })
    }
}

fn check_origins(a: &ArrivalProcess, m: &PremiumModel) -> Result<(), Error> {
    if a.t0() == m.t0() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "arrival and premium must share the same origin t0",
            value: m.t0() - a.t0(),
        })
    }
}

/// Transition time drawn for `path_index`, independent of any other stream.
pub fn transition_time_for_path(
    params: &MarketParams,
    arrival: &ArrivalProcess,
    path_index: u64,
) -> f64 {
    let seed = derive_seed(params.master_seed, 2 * path_index);
    arrival.sample(seed).transition_time
}

/// Simulates one paired path with exact log-space GBM stepping.
pub fn simulate_path(
    params: &MarketParams,
    premium: &PremiumModel,
    phi: f64,
    arrival: &ArrivalProcess,
    opts: &SimOptions,
    path_index: u64,
) -> Result<SimulationPath, Error> {
    params.validate()?;
    check_phi(phi)?;
    check_origins(arrival, premium)?;

    let t0 = arrival.t0();
    let tau = transition_time_for_path(params, arrival, path_index);
    let steps = params.steps();

    let mut noise = UniformStream::from_seed(derive_seed(params.master_seed, 2 * path_index + 1));
    let drift = (params.mu - 0.5 * params.sigma * params.sigma) * params.dt;
    let vol = params.sigma * libm::sqrt(params.dt);

    let mut times = Vec::with_capacity(steps as usize + 1);
    let mut riskfree = Vec::with_capacity(steps as usize + 1);
    let mut carbon = Vec::with_capacity(steps as usize + 1);

    let mut rf = params.s0;
    // Separate carbon GBM state, only advanced in drift-adjusted mode.
    let mut cg = params.s0;

    for k in 0..=steps {
        let t = t0 + k as f64 * params.dt;
        if k > 0 {
            let z = noise.standard_normal();
            rf *= libm::exp(drift + vol * z);
            if opts.premium_application == PremiumApplication::DriftAdjusted {
                let prev_t = t0 + (k - 1) as f64 * params.dt;
                let extra = premium.rate_unchecked(prev_t) * params.dt;
                cg *= libm::exp(drift + extra + vol * z);
            }
        }
        let unshocked = match opts.premium_application {
            PremiumApplication::AdditiveLevel => rf + premium.cumulative_unchecked(t),
            PremiumApplication::DriftAdjusted => cg,
        };
        let mut c = if t >= tau { unshocked - phi } else { unshocked };
        if opts.clamp_at_zero && c < 0.0 {
            c = 0.0;
        }
        times.push(t);
        riskfree.push(rf);
        carbon.push(c);
    }

    Ok(SimulationPath {
        times,
        riskfree,
        carbon,
        transition_time: tau,
        phi_applied: phi,
    })
}

/// Runs the no-arbitrage Monte Carlo: premium earned to each path's
/// transition (extended analytically beyond the horizon) against the
/// constant loss `phi`.
pub fn run_monte_carlo(
    params: &MarketParams,
    premium: &PremiumModel,
    phi: f64,
    arrival: &ArrivalProcess,
    n_paths: u64,
) -> Result<McReport, Error> {
    params.validate()?;
    check_phi(phi)?;
    check_origins(arrival, premium)?;
    if n_paths < 2 {
        return Err(Error::Domain {
            what: "Monte Carlo needs at least 2 paths",
            value: n_paths as f64,
        });
    }

    // Premium earned is deterministic given the transition time, so the
    // price paths never need to be materialized here. Welford accumulation
    // in path-index order: stable, deterministic, and exact when every path
    // earns the same amount.
    let mut transitioned: u64 = 0;
    let end = arrival.t0() + params.horizon;
    let mut mean_premium = 0.0_f64;
    let mut m2 = 0.0_f64;
    for i in 0..n_paths {
        let tau = transition_time_for_path(params, arrival, i);
        if tau <= end {
            transitioned += 1;
        }
        let x = premium.cumulative(tau)?;
        let delta = x - mean_premium;
        mean_premium += delta / (i + 1) as f64;
        m2 += delta * (x - mean_premium);
    }

    let n = n_paths as f64;
    let se_premium = libm::sqrt(m2.max(0.0) / (n * (n - 1.0)));

    Ok(McReport {
        n_paths,
        mean_premium_earned: mean_premium,
        se_premium,
        mean_loss: phi,
        se_loss: 0.0,
        residual: mean_premium - phi,
        fraction_transitioned_in_horizon: transitioned as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_params(seed: u64) -> MarketParams {
        MarketParams {
            mu: 0.0015,
            sigma: 0.01,
            s0: 1.0,
            dt: 1.0,
            horizon: 750.0,
            master_seed: seed,
        }
    }

    fn exp750() -> ArrivalProcess {
        ArrivalProcess::exponential(750.0, 0.0).unwrap()
    }

    #[test]
    fn degenerate_gbm_is_constant() {
        let params = MarketParams {
            mu: 0.0,
            sigma: 0.0,
            s0: 1.0,
            dt: 1.0,
            horizon: 100.0,
            master_seed: 1,
        };
        let m = PremiumModel::constant(0.0, 0.0).unwrap();
        let a = exp750();
        let path = simulate_path(&params, &m, 0.0, &a, &SimOptions::default(), 0).unwrap();
        assert_eq!(path.times.len(), 101);
        assert!(path.riskfree.iter().all(|&v| v == 1.0));
        assert!(path.carbon.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn deterministic_arithmetic_with_point_mass() {
        // No noise: carbon = s0 + p*t until the transition at t = 331,
        // then drops by exactly phi.
        let params = MarketParams {
            mu: 0.0,
            sigma: 0.0,
            s0: 1.0,
            dt: 1.0,
            horizon: 750.0,
            master_seed: 77,
        };
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        let a = ArrivalProcess::point_mass(331.0, 0.0).unwrap();
        let phi = 0.75;
        let path = simulate_path(&params, &m, phi, &a, &SimOptions::default(), 0).unwrap();
        assert_eq!(path.transition_time, 331.0);
        for (k, (&t, &c)) in path.times.iter().zip(&path.carbon).enumerate() {
            let unshocked = 1.0 + 0.001 * t;
            if t < 331.0 {
                assert_eq!(c, unshocked, "step {k}");
            } else {
                assert_eq!(c, unshocked - phi, "step {k}");
            }
        }
    }

    #[test]
    fn identical_inputs_identical_paths() {
        let params = fig1_params(42);
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        let a = exp750();
        let p1 = simulate_path(&params, &m, 0.75, &a, &SimOptions::default(), 3).unwrap();
        let p2 = simulate_path(&params, &m, 0.75, &a, &SimOptions::default(), 3).unwrap();
        assert_eq!(p1, p2);
        let p3 = simulate_path(&params, &m, 0.75, &a, &SimOptions::default(), 4).unwrap();
        assert_ne!(p1.riskfree, p3.riskfree);
    }

    #[test]
    fn noise_pairing_zero_premium() {
        let params = fig1_params(5);
        let m = PremiumModel::constant(0.0, 0.0).unwrap();
        let a = exp750();
        let path = simulate_path(&params, &m, 0.0, &a, &SimOptions::default(), 11).unwrap();
        for (r, c) in path.riskfree.iter().zip(&path.carbon) {
            assert_eq!(r.to_bits(), c.to_bits());
        }
    }

    #[test]
    fn shock_subtraction_is_bit_exact() {
        let params = fig1_params(9);
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        let a = ArrivalProcess::point_mass(200.0, 0.0).unwrap();
        let phi = 0.4;
        let path = simulate_path(&params, &m, phi, &a, &SimOptions::default(), 0).unwrap();
        let plain = simulate_path(&params, &m, 0.0, &a, &SimOptions::default(), 0).unwrap();
        for k in 0..path.times.len() {
            if path.times[k] >= 200.0 {
                let expected = plain.carbon[k] - phi;
                assert_eq!(path.carbon[k].to_bits(), expected.to_bits(), "step {k}");
            }
        }
    }

    #[test]
    fn clamp_at_zero_floors_the_price() {
        let params = MarketParams {
            mu: 0.0,
            sigma: 0.0,
            s0: 1.0,
            dt: 1.0,
            horizon: 10.0,
            master_seed: 0,
        };
        let m = PremiumModel::constant(0.0, 0.0).unwrap();
        let a = ArrivalProcess::point_mass(5.0, 0.0).unwrap();
        let raw = simulate_path(&params, &m, 2.0, &a, &SimOptions::default(), 0).unwrap();
        assert!(raw.carbon.iter().any(|&c| c < 0.0));
        let clamped = simulate_path(
            &params,
            &m,
            2.0,
            &a,
            &SimOptions {
                clamp_at_zero: true,
                ..SimOptions::default()
            },
            0,
        )
        .unwrap();
        assert!(clamped.carbon.iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn martingale_at_zero_drift() {
        let params = MarketParams {
            mu: 0.0,
            sigma: 0.01,
            s0: 1.0,
            dt: 1.0,
            horizon: 100.0,
            master_seed: 314,
        };
        let m = PremiumModel::constant(0.0, 0.0).unwrap();
        let a = exp750();
        let n = 20_000_u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..n {
            let path = simulate_path(&params, &m, 0.0, &a, &SimOptions::default(), i).unwrap();
            let last = *path.riskfree.last().unwrap();
            sum += last;
            sumsq += last * last;
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!(
            (mean - 1.0).abs() <= 3.0 * se,
            "mean {mean}, se {se} (exact log stepping has no discretization bias)"
        );
    }

    #[test]
    fn monte_carlo_zero_configuration() {
        let params = fig1_params(0);
        let m = PremiumModel::constant(0.0, 0.0).unwrap();
        let a = exp750();
        let r = run_monte_carlo(&params, &m, 0.0, &a, 100).unwrap();
        assert_eq!(r.mean_premium_earned, 0.0);
        assert_eq!(r.se_premium, 0.0);
        assert_eq!(r.mean_loss, 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn monte_carlo_point_mass_is_exact() {
        let params = fig1_params(0);
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        let a = ArrivalProcess::point_mass(300.0, 0.0).unwrap();
        let r = run_monte_carlo(&params, &m, 0.30, &a, 1000).unwrap();
        assert_eq!(r.residual, 0.0);
        assert_eq!(r.se_premium, 0.0);
        assert_eq!(r.fraction_transitioned_in_horizon, 1.0);
    }

    #[test]
    fn monte_carlo_no_arbitrage_smoke() {
        let params = fig1_params(2024);
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        let a = exp750();
        let r = run_monte_carlo(&params, &m, 0.75, &a, 20_000).unwrap();
        assert!(
            r.residual.abs() <= 3.0 * r.se_premium,
            "residual {}, se {}",
            r.residual,
            r.se_premium
        );
    }

    #[test]
    fn per_path_results_do_not_depend_on_evaluation_order() {
        let params = fig1_params(8);
        let a = exp750();
        let forward: Vec<f64> = (0..64)
            .map(|i| transition_time_for_path(&params, &a, i))
            .collect();
        let mut backward: Vec<f64> = (0..64)
            .rev()
            .map(|i| transition_time_for_path(&params, &a, i))
            .collect();
        backward.reverse();
        assert_eq!(forward, backward);
    }

    #[test]
    fn validation_errors() {
        let mut params = fig1_params(0);
        params.dt = 0.0;
        let m = PremiumModel::constant(0.001, 0.0).unwrap();
        let a = exp750();
        assert!(simulate_path(&params, &m, 0.75, &a, &SimOptions::default(), 0).is_err());

        let params = fig1_params(0);
        assert!(simulate_path(&params, &m, -1.0, &a, &SimOptions::default(), 0).is_err());
        assert!(run_monte_carlo(&params, &m, 0.75, &a, 1).is_err());
    }
}
