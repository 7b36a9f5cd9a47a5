//! Adaptive quadrature on finite intervals and truncated half-lines.
//!
//! The workhorse is a 7/15-point embedded Gauss–Kronrod pair driven by
//! worst-interval-first bisection, the classic QUADPACK recipe: robust on
//! smooth densities with sharp decay, and every call is a pure function of
//! its arguments, so results are bitwise reproducible.
//!
//! Half-line integrals are truncated at a caller-supplied point beyond which
//! the integrand's mass is known to be small; [`integrate_halfline`] then
//! verifies that the tail actually decays, bounds the discarded mass, folds
//! the bound into the error estimate, and extends the truncation point when
//! the integrand turns out to carry more tail than the caller's cutoff
//! suggested (as happens when a growing premium multiplies a survival
//! function).

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Error;

/// Default integrand-evaluation budget per call.
pub const DEFAULT_MAX_EVALUATIONS: u64 = 1_000_000;

/// Outcome of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    /// Estimate of the integral.
    pub value: f64,
    /// Estimated absolute error, including any truncation bound.
    pub abs_error_estimate: f64,
    /// Number of integrand evaluations spent.
    pub evaluations: u64,
}

// 15-point Kronrod abscissae on [-1, 1] (positive half; symmetric).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

// 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// 15-point Kronrod weights.
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

struct Panel {
    value: f64,
    error: f64,
    resabs: f64,
}

fn eval<F: Fn(f64) -> f64>(f: &F, t: f64) -> Result<f64, Error> {
    let v = f(t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { at: t })
    }
}

/// QUADPACK's error rescaling: sharpens the raw |K15 - G7| difference using
/// the integral of |f - mean| and floors it at machine scale.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One 15-point Gauss–Kronrod evaluation over [a, b].
fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel, Error> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = eval(f, center)?;
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0_f64; 7];
    let mut fv2 = [0.0_f64; 7];

    // Odd Kronrod nodes coincide with the Gauss nodes.
    for (j, wg_j) in WG.iter().enumerate().take(3) {
        let jtw = j * 2 + 1;
        let x = half * XGK[jtw];
        let f1 = eval(f, center - x)?;
        let f2 = eval(f, center + x)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += wg_j * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (libm::fabs(f1) + libm::fabs(f2));
    }
    for j in 0..4 {
        let jtw = j * 2;
        if jtw >= 7 {
            break;
        }
        let x = half * XGK[jtw];
        let f1 = eval(f, center - x)?;
        let f2 = eval(f, center + x)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (libm::fabs(f1) + libm::fabs(f2));
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * libm::fabs(f_center - mean);
    for j in 0..7 {
        res_asc += WGK[j] * (libm::fabs(fv1[j] - mean) + libm::fabs(fv2[j] - mean));
    }

    let raw_err = (res_kronrod - res_gauss) * half;
    Ok(Panel {
        value: res_kronrod * half,
        error: rescale_error(raw_err, res_abs * abs_half, res_asc * abs_half),
        resabs: res_abs * abs_half,
    })
}

const PANEL_EVALS: u64 = 15;

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    resabs: f64,
    seq: u64,
}

impl Segment {
    fn from_panel(a: f64, b: f64, p: Panel, seq: u64) -> Self {
        Segment {
            a,
            b,
            value: p.value,
            error: p.error,
            resabs: p.resabs,
            seq,
        }
    }
}

// Worst error first; the sequence number breaks ties so the refinement
// order (and therefore the result) never depends on heap internals.
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(self.seq.cmp(&other.seq))
    }
}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}

fn check_finite_interval(a: f64, b: f64, rel_tol: f64) -> Result<(), Error> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain {
            what: "integration bounds must be finite",
            value: if a.is_finite() { b } else { a },
        });
    }
    if a > b {
        return Err(Error::Domain {
            what: "integration requires a <= b",
            value: a - b,
        });
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter {
            what: "rel_tol must lie in (0, 1)",
            value: rel_tol,
        });
    }
    Ok(())
}

/// Integrates `f` over the finite interval `[a, b]` to relative tolerance
/// `rel_tol`, spending at most `max_evals` integrand evaluations.
///
/// The accepted error is `max(rel_tol * |value|, machine floor)`, the floor
/// being the usual `50 eps * integral of |f|` guard that keeps cancelling
/// integrals from demanding impossible relative accuracy.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_evals: u64,
) -> Result<QuadratureResult, Error> {
    integrate_with_breakpoints(f, a, b, &[], rel_tol, max_evals)
}

/// Like [`integrate`], but seeds the subdivision at the given breakpoints
/// (sorted; points outside `(a, b)` are ignored).
///
/// Jump discontinuities must be panel boundaries: a jump strictly inside a
/// panel can hide between quadrature nodes, where the embedded pair agrees
/// on a biased value and reports no error. Piecewise densities (the
/// empirical histogram) therefore pass their bin edges here.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    max_evals: u64,
) -> Result<QuadratureResult, Error> {
    check_finite_interval(a, b, rel_tol)?;

    let mut cuts = Vec::with_capacity(breakpoints.len() + 2);
    cuts.push(a);
    for &p in breakpoints {
        if p > a && p < b {
            cuts.push(p);
        }
    }
    cuts.push(b);

    let mut evals = 0_u64;
    let mut sum_value = 0.0;
    let mut sum_err = 0.0;
    let mut sum_resabs = 0.0;

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut seq: u64 = 0;

    for w in cuts.windows(2) {
        if evals + PANEL_EVALS > max_evals {
            return Err(Error::NonConvergence { evaluations: evals });
        }
        let p = panel(&f, w[0], w[1])?;
        evals += PANEL_EVALS;
        sum_value += p.value;
        sum_err += p.error;
        sum_resabs += p.resabs;
        heap.push(Segment::from_panel(w[0], w[1], p, seq));
        seq += 1;
    }

    loop {
        let bound = (rel_tol * libm::fabs(sum_value)).max(50.0 * f64::EPSILON * sum_resabs);
        if sum_err <= bound {
            break;
        }
        let Some(worst) = heap.pop() else {
            // Every segment is at machine width and the tolerance is still
            // out of reach.
            return Err(Error::NonConvergence { evaluations: evals });
        };
        if evals + 2 * PANEL_EVALS > max_evals {
            return Err(Error::NonConvergence { evaluations: evals });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        let left = panel(&f, worst.a, mid)?;
        let right = panel(&f, mid, worst.b)?;
        evals += 2 * PANEL_EVALS;

        sum_value += left.value + right.value - worst.value;
        sum_err += left.error + right.error - worst.error;
        sum_resabs += left.resabs + right.resabs - worst.resabs;

        heap.push(Segment::from_panel(worst.a, mid, left, seq + 1));
        heap.push(Segment::from_panel(mid, worst.b, right, seq + 2));
        seq += 2;
    }

    // Fresh summation in left-to-right order: independent of the incremental
    // update history and deterministic.
    let mut segments = heap.into_vec();
    segments.append(&mut frozen);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().map(|s| s.value).sum();
    let error = segments.iter().map(|s| s.error).sum();
    Ok(QuadratureResult {
        value,
        abs_error_estimate: error,
        evaluations: evals,
    })
}

const MAX_TAIL_BLOCKS: usize = 200;
// Consecutive truncation-point doublings over which a still-growing tail is
// declared divergent.
const MAX_RISING_ROUNDS: u32 = 4;

enum TailProbe {
    Bounded { bound: f64, evaluations: u64 },
    NotDecaying { evaluations: u64 },
}

fn next_block_edge(t: f64) -> f64 {
    if t >= 1.0 {
        t * 2.0
    } else {
        t + 1.0
    }
}

/// Bounds `integral of |f| over (start, inf)` by left-endpoint rectangles
/// over geometrically growing blocks, valid while |f| keeps decreasing;
/// reports `NotDecaying` the moment a sampled point breaks monotonicity.
fn probe_tail<F: Fn(f64) -> f64>(f: &F, start: f64) -> Result<TailProbe, Error> {
    let mut lo = start;
    let mut total = 0.0_f64;
    let mut evals = 0_u64;
    for _ in 0..MAX_TAIL_BLOCKS {
        let hi = next_block_edge(lo);
        let mid = 0.5 * (lo + hi);
        let f_lo = libm::fabs(eval(f, lo)?);
        let f_mid = libm::fabs(eval(f, mid)?);
        let f_hi = libm::fabs(eval(f, hi)?);
        evals += 3;
        if f_mid > f_lo || f_hi > f_mid {
            return Ok(TailProbe::NotDecaying { evaluations: evals });
        }
        let block = (hi - lo) * f_lo;
        total += block;
        if !total.is_finite() {
            return Ok(TailProbe::NotDecaying { evaluations: evals });
        }
        if block <= 1e-16 * (1.0 + total) {
            return Ok(TailProbe::Bounded {
                bound: total,
                evaluations: evals,
            });
        }
        lo = hi;
    }
    Ok(TailProbe::NotDecaying { evaluations: evals })
}

/// Integrates `f` over `[a, inf)` for a nonnegative integrand whose tail is
/// eventually nonincreasing.
///
/// `t_star` is the caller's truncation point: the point beyond which the
/// caller expects the remaining mass to be negligible (for a density,
/// the inverse survival function at the configured tail cutoff). The
/// discarded tail is bounded explicitly and added to the error estimate;
/// if the bound is too large for `rel_tol` the truncation point is pushed
/// out, and an integrand whose tail keeps growing through repeated
/// extensions is reported as [`Error::DivergentExpectation`].
///
/// `breakpoints` marks jump locations of the integrand, as in
/// [`integrate_with_breakpoints`].
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    t_star: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    max_evals: u64,
) -> Result<QuadratureResult, Error> {
    if !t_star.is_finite() {
        return Err(Error::DivergentExpectation);
    }
    let mut upper = t_star.max(a);
    check_finite_interval(a, upper, rel_tol)?;

    let head = integrate_with_breakpoints(&f, a, upper, breakpoints, rel_tol, max_evals)?;
    let mut value = head.value;
    let mut error = head.abs_error_estimate;
    let mut evals = head.evaluations;
    let mut rising_rounds = 0_u32;

    loop {
        // Past the caller-guaranteed domain an overflowing integrand means
        // the tail has outgrown working precision: report divergence, not a
        // bad integrand.
        let probe = match probe_tail(&f, upper) {
            Ok(p) => p,
            Err(Error::NonFiniteIntegrand { .. }) => return Err(Error::DivergentExpectation),
            Err(e) => return Err(e),
        };
        match probe {
            TailProbe::Bounded { bound, evaluations } => {
                evals += evaluations;
                if bound <= 0.5 * rel_tol * libm::fabs(value) + f64::MIN_POSITIVE {
                    return Ok(QuadratureResult {
                        value,
                        abs_error_estimate: error + bound,
                        evaluations: evals,
                    });
                }
                rising_rounds = 0;
            }
            TailProbe::NotDecaying { evaluations } => {
                evals += evaluations;
                rising_rounds += 1;
                if rising_rounds >= MAX_RISING_ROUNDS {
                    return Err(Error::DivergentExpectation);
                }
            }
        }
        if evals >= max_evals {
            return Err(Error::NonConvergence { evaluations: evals });
        }
        let next = next_block_edge(upper);
        let ext = match integrate(&f, upper, next, rel_tol, max_evals - evals) {
            Ok(r) => r,
            Err(Error::NonFiniteIntegrand { .. }) => return Err(Error::DivergentExpectation),
            Err(e) => return Err(e),
        };
        value += ext.value;
        error += ext.abs_error_estimate;
        evals += ext.evaluations;
        upper = next;
    }
}
