//! Transition-event arrival processes.
//!
//! An [`ArrivalProcess`] is the probability law of the time at which the
//! single transition event hits, supported on `[t0, inf)` and integrating
//! to one: the event is a surety, only its date is random. The continuous
//! families (exponential, Weibull, log-normal) expose densities, survival
//! and hazard; the point mass and empirical histogram are handled with
//! exact arithmetic instead of quadrature wherever a density would be
//! needed.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::quad::{self, QuadratureResult};
use crate::rng::UniformStream;
use crate::Tolerances;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Distribution family of the arrival time, with parameters in days.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrivalKind {
    Exponential {
        scale: f64,
    },
    Weibull {
        shape: f64,
        scale: f64,
    },
    LogNormal {
        log_mean: f64,
        log_sd: f64,
    },
    PointMass {
        event_time: f64,
    },
    /// Piecewise-constant density over `bin_edges`, one mass per bin.
    EmpiricalHistogram {
        bin_edges: Vec<f64>,
        masses: Vec<f64>,
    },
}

/// The arrival law of the transition event, anchored at origin `t0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalProcess {
    kind: ArrivalKind,
    t0: f64,
}

/// One realized transition time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskProcessSample {
    pub transition_time: f64,
}

fn require_positive(what: &'static str, v: f64) -> Result<(), Error> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what, value: v })
    }
}

fn require_finite(what: &'static str, v: f64) -> Result<(), Error> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { what, value: v })
    }
}

impl ArrivalProcess {
    pub fn exponential(scale: f64, t0: f64) -> Result<Self, Error> {
        require_positive("exponential scale must be positive", scale)?;
        require_finite("t0 must be finite", t0)?;
        Ok(ArrivalProcess {
            kind: ArrivalKind::Exponential { scale },
            t0,
        })
    }

    pub fn weibull(shape: f64, scale: f64, t0: f64) -> Result<Self, Error> {
        require_positive("weibull shape must be positive", shape)?;
        require_positive("weibull scale must be positive", scale)?;
        require_finite("t0 must be finite", t0)?;
        Ok(ArrivalProcess {
            kind: ArrivalKind::Weibull { shape, scale },
            t0,
        })
    }

    pub fn log_normal(log_mean: f64, log_sd: f64, t0: f64) -> Result<Self, Error> {
        require_finite("log_mean must be finite", log_mean)?;
        require_positive("log_sd must be positive", log_sd)?;
        require_finite("t0 must be finite", t0)?;
        Ok(ArrivalProcess {
            kind: ArrivalKind::LogNormal { log_mean, log_sd },
            t0,
        })
    }

    pub fn point_mass(event_time: f64, t0: f64) -> Result<Self, Error> {
        require_finite("event_time must be finite", event_time)?;
        require_finite("t0 must be finite", t0)?;
        if event_time < t0 {
            return Err(Error::InvalidParameter {
                what: "point mass must lie at or after t0",
                value: event_time,
            });
        }
        Ok(ArrivalProcess {
            kind: ArrivalKind::PointMass { event_time },
            t0,
        })
    }

    pub fn empirical_histogram(
        bin_edges: Vec<f64>,
        masses: Vec<f64>,
        t0: f64,
    ) -> Result<Self, Error> {
        require_finite("t0 must be finite", t0)?;
        if bin_edges.len() < 2 || masses.len() != bin_edges.len() - 1 {
            return Err(Error::InvalidParameter {
                what: "histogram needs n+1 edges for n bins",
                value: bin_edges.len() as f64,
            });
        }
        for w in bin_edges.windows(2) {
            if !(w[0].is_finite() && w[1].is_finite() && w[0] < w[1]) {
                return Err(Error::InvalidParameter {
                    what: "histogram edges must be finite and strictly increasing",
                    value: w[1],
                });
            }
        }
        if bin_edges[0] < t0 {
            return Err(Error::InvalidParameter {
                what: "histogram support must start at or after t0",
                value: bin_edges[0],
            });
        }
        let mut total = 0.0;
        for &m in &masses {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidParameter {
                    what: "histogram masses must be nonnegative",
                    value: m,
                });
            }
            total += m;
        }
        if libm::fabs(total - 1.0) > 1e-12 {
            return Err(Error::InvalidParameter {
                what: "histogram masses must sum to 1",
                value: total,
            });
        }
        Ok(ArrivalProcess {
            kind: ArrivalKind::EmpiricalHistogram { bin_edges, masses },
            t0,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn kind(&self) -> &ArrivalKind {
        &self.kind
    }

    /// Probability density at `t`; zero before `t0`. The point mass has no
    /// density and reports `inf` at its atom.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < self.t0 {
            return 0.0;
        }
        let x = t - self.t0;
        match &self.kind {
            ArrivalKind::Exponential { scale } => libm::exp(-x / scale) / scale,
            ArrivalKind::Weibull { shape, scale } => {
                if x == 0.0 {
                    return if *shape > 1.0 {
                        0.0
                    } else if *shape == 1.0 {
                        1.0 / scale
                    } else {
                        f64::INFINITY
                    };
                }
                let z = x / scale;
                (shape / scale) * libm::pow(z, shape - 1.0) * libm::exp(-libm::pow(z, *shape))
            }
            ArrivalKind::LogNormal { log_mean, log_sd } => {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (libm::log(x) - log_mean) / log_sd;
                libm::exp(-0.5 * z * z) / (x * log_sd * SQRT_2PI)
            }
            ArrivalKind::PointMass { event_time } => {
                if t == *event_time {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            ArrivalKind::EmpiricalHistogram { bin_edges, masses } => hist_pdf(bin_edges, masses, t),
        }
    }

    /// P(T <= t).
    pub fn cdf(&self, t: f64) -> f64 {
        if t < self.t0 {
            return 0.0;
        }
        if t == f64::INFINITY {
            return 1.0;
        }
        let x = t - self.t0;
        match &self.kind {
            ArrivalKind::Exponential { scale } => -libm::expm1(-x / scale),
            ArrivalKind::Weibull { shape, scale } => -libm::expm1(-libm::pow(x / scale, *shape)),
            ArrivalKind::LogNormal { log_mean, log_sd } => {
                if x <= 0.0 {
                    0.0
                } else {
                    math::norm_cdf((libm::log(x) - log_mean) / log_sd)
                }
            }
            ArrivalKind::PointMass { event_time } => {
                if t >= *event_time {
                    1.0
                } else {
                    0.0
                }
            }
            ArrivalKind::EmpiricalHistogram { bin_edges, masses } => hist_cdf(bin_edges, masses, t),
        }
    }

    /// P(T > t); computed directly (not via `1 - cdf`) where the tail needs
    /// full precision.
    pub fn survival(&self, t: f64) -> f64 {
        if t < self.t0 {
            return 1.0;
        }
        if t == f64::INFINITY {
            return 0.0;
        }
        let x = t - self.t0;
        match &self.kind {
            ArrivalKind::Exponential { scale } => libm::exp(-x / scale),
            ArrivalKind::Weibull { shape, scale } => libm::exp(-libm::pow(x / scale, *shape)),
            ArrivalKind::LogNormal { log_mean, log_sd } => {
                if x <= 0.0 {
                    1.0
                } else {
                    math::norm_cdf(-(libm::log(x) - log_mean) / log_sd)
                }
            }
            ArrivalKind::PointMass { event_time } => {
                if t >= *event_time {
                    0.0
                } else {
                    1.0
                }
            }
            ArrivalKind::EmpiricalHistogram { bin_edges, masses } => {
                (1.0 - hist_cdf(bin_edges, masses, t)).max(0.0)
            }
        }
    }

    /// Probability that the event arrives in `(t_a, t_b]`.
    pub fn probability_between(&self, t_a: f64, t_b: f64) -> Result<f64, Error> {
        if t_a < self.t0 {
            return Err(Error::Domain {
                what: "interval must start at or after t0",
                value: t_a,
            });
        }
        if t_a > t_b {
            return Err(Error::Domain {
                what: "interval must be ordered (t_a <= t_b)",
                value: t_a - t_b,
            });
        }
        Ok((self.cdf(t_b) - self.cdf(t_a)).clamp(0.0, 1.0))
    }

    /// Instantaneous transition intensity pdf/survival.
    ///
    /// Undefined for the point mass (no density) and wherever survival has
    /// decayed to the floor.
    pub fn hazard(&self, t: f64, hazard_floor: f64) -> Result<f64, Error> {
        if matches!(self.kind, ArrivalKind::PointMass { .. }) {
            return Err(Error::TailUndefined { at: t });
        }
        let s = self.survival(t);
        if s <= hazard_floor {
            return Err(Error::TailUndefined { at: t });
        }
        Ok(self.pdf(t) / s)
    }

    /// Jump locations of the density, for breakpoint-aware quadrature. Only
    /// the histogram has any.
    pub fn breakpoints(&self) -> &[f64] {
        match &self.kind {
            ArrivalKind::EmpiricalHistogram { bin_edges, .. } => bin_edges,
            _ => &[],
        }
    }

    /// Time `T*` with `survival(T*) <= tail_cutoff`; quadrature beyond this
    /// point is replaced by an explicit bound. Compact supports return their
    /// upper end.
    pub fn truncation_time(&self, tail_cutoff: f64) -> f64 {
        match &self.kind {
            ArrivalKind::Exponential { scale } => self.t0 - scale * libm::log(tail_cutoff),
            ArrivalKind::Weibull { shape, scale } => {
                self.t0 + scale * libm::pow(-libm::log(tail_cutoff), 1.0 / shape)
            }
            ArrivalKind::LogNormal { log_mean, log_sd } => {
                self.t0 + libm::exp(log_mean + log_sd * math::inv_norm_cdf(1.0 - tail_cutoff))
            }
            ArrivalKind::PointMass { event_time } => *event_time,
            ArrivalKind::EmpiricalHistogram { bin_edges, .. } => *bin_edges.last().unwrap(),
        }
    }

    /// Inverse CDF; `u` in [0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        match &self.kind {
            ArrivalKind::Exponential { scale } => self.t0 - scale * libm::log1p(-u),
            ArrivalKind::Weibull { shape, scale } => {
                self.t0 + scale * libm::pow(-libm::log1p(-u), 1.0 / shape)
            }
            ArrivalKind::LogNormal { log_mean, log_sd } => {
                self.t0 + libm::exp(log_mean + log_sd * math::inv_norm_cdf(u))
            }
            ArrivalKind::PointMass { event_time } => *event_time,
            ArrivalKind::EmpiricalHistogram { bin_edges, masses } => {
                hist_quantile(bin_edges, masses, u)
            }
        }
    }

    /// Draws one transition time by inverse CDF from the stream keyed by
    /// `rng_seed`; the same seed always yields the same time.
    pub fn sample(&self, rng_seed: u64) -> RiskProcessSample {
        let mut stream = UniformStream::from_seed(rng_seed);
        RiskProcessSample {
            transition_time: self.quantile(stream.uniform01()),
        }
    }

    /// Expected arrival time with the quadrature error estimate attached.
    pub fn mean_with_estimate(&self, tol: &Tolerances) -> Result<QuadratureResult, Error> {
        match &self.kind {
            ArrivalKind::PointMass { event_time } => Ok(exact(*event_time)),
            ArrivalKind::EmpiricalHistogram { bin_edges, masses } => {
                Ok(exact(hist_mean(bin_edges, masses)))
            }
            _ => quad::integrate_halfline(
                |t| t * self.pdf(t),
                self.t0,
                self.truncation_time(tol.tail_cutoff),
                self.breakpoints(),
                tol.rel_tol,
                tol.max_evaluations,
            ),
        }
    }

    /// Expected arrival time E(T).
    pub fn mean(&self, tol: &Tolerances) -> Result<f64, Error> {
        Ok(self.mean_with_estimate(tol)?.value)
    }

    /// E(T | T > t_prime). Requires survival above the hazard floor.
    pub fn conditional_mean_after(&self, t_prime: f64, tol: &Tolerances) -> Result<f64, Error> {
        let s = self.survival(t_prime);
        if s <= tol.hazard_floor {
            return Err(Error::TailUndefined { at: t_prime });
        }
        match &self.kind {
            ArrivalKind::PointMass { event_time } => Ok(*event_time),
            ArrivalKind::EmpiricalHistogram { bin_edges, masses } => {
                Ok(hist_mean_above(bin_edges, masses, t_prime) / s)
            }
            _ => {
                let from = t_prime.max(self.t0);
                let partial = quad::integrate_halfline(
                    |t| t * self.pdf(t),
                    from,
                    self.truncation_time(tol.tail_cutoff),
                    self.breakpoints(),
                    tol.rel_tol,
                    tol.max_evaluations,
                )?;
                Ok(partial.value / s)
            }
        }
    }
}

fn exact(value: f64) -> QuadratureResult {
    QuadratureResult {
        value,
        abs_error_estimate: 0.0,
        evaluations: 1,
    }
}

fn hist_bin(edges: &[f64], t: f64) -> usize {
    let i = edges.partition_point(|&e| e <= t);
    i.saturating_sub(1).min(edges.len() - 2)
}

fn hist_pdf(edges: &[f64], masses: &[f64], t: f64) -> f64 {
    if t < edges[0] || t >= *edges.last().unwrap() {
        return 0.0;
    }
    let i = hist_bin(edges, t);
    masses[i] / (edges[i + 1] - edges[i])
}

fn hist_cdf(edges: &[f64], masses: &[f64], t: f64) -> f64 {
    if t <= edges[0] {
        return 0.0;
    }
    if t >= *edges.last().unwrap() {
        return 1.0;
    }
    let i = hist_bin(edges, t);
    let head: f64 = masses[..i].iter().sum();
    let frac = (t - edges[i]) / (edges[i + 1] - edges[i]);
    (head + masses[i] * frac).min(1.0)
}

fn hist_quantile(edges: &[f64], masses: &[f64], u: f64) -> f64 {
    let mut cum = 0.0;
    for (i, &m) in masses.iter().enumerate() {
        if cum + m > u && m > 0.0 {
            return edges[i] + (u - cum) / m * (edges[i + 1] - edges[i]);
        }
        cum += m;
    }
    *edges.last().unwrap()
}

fn hist_mean(edges: &[f64], masses: &[f64]) -> f64 {
    masses
        .iter()
        .enumerate()
        .map(|(i, m)| m * 0.5 * (edges[i] + edges[i + 1]))
        .sum()
}

// Unnormalized E(T; T > t): exact for the piecewise-constant density.
fn hist_mean_above(edges: &[f64], masses: &[f64], t: f64) -> f64 {
    let last = *edges.last().unwrap();
    if t <= edges[0] {
        return hist_mean(edges, masses);
    }
    if t >= last {
        return 0.0;
    }
    let i = hist_bin(edges, t);
    let width = edges[i + 1] - edges[i];
    let mut total = masses[i] * (edges[i + 1] - t) / width * 0.5 * (t + edges[i + 1]);
    for j in (i + 1)..masses.len() {
        total += masses[j] * 0.5 * (edges[j] + edges[j + 1]);
    }
    total
}
