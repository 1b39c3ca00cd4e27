//! Rate-distortion bounds for lossy compression of permutations.
//!
//! A code `C` that covers S_n to distortion `D` needs at least
//! `n!/B(D)` codewords and at most roughly `ln`-factor more; this module
//! turns those counting arguments, their finite-`n` refinements under the
//! Kendall metric, the asymptotic regime analysis, and the Chebyshev rate
//! bounds into callable functions, all anchored on the exact ball sizes
//! from [`crate::ball`].
//!
//! Conventions: rates are per-symbol (`R = lg M / n`), and the Kendall
//! results are phrased as the excess over the entropy `lg(n!)/n`, i.e.
//! `A = R - lg(n!)/n`, which is negative and measures the compression
//! gain.  `delta = D/n` throughout.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::ball::{
    chebyshev_ball_exact, kendall_ball_exact,
};
use crate::error::{Error, Result};
use crate::numutil::{
    big_ratio, ceil_ratio, dyadic_from_f64, factorial, lg_biguint, lg_ratio, ln_biguint,
};
use crate::perm::Metric;

const LG_E: f64 = std::f64::consts::LOG2_E;

/// A metric, a permutation length, and a distortion budget.
#[derive(Clone, Copy, Debug)]
pub struct DistortionQuery {
    pub metric: Metric,
    pub n: usize,
    pub d: u64,
}

impl DistortionQuery {
    pub fn new(metric: Metric, n: usize, d: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("need n >= 2, got {n}")));
        }
        if d < 1 {
            return Err(Error::Domain("need D >= 1".into()));
        }
        Ok(DistortionQuery { metric, n, d })
    }

    /// `delta = D / n`, exact.
    pub fn delta(&self) -> BigRational {
        big_ratio(BigUint::from(self.d), BigUint::from(self.n))
    }

    /// Distortion budgets this large admit trivial or degenerate codes
    /// (Kendall: half the diameter, where `{id, reversal}` already covers;
    /// Chebyshev: the full diameter).  Informational, never an error.
    pub fn trivial_regime(&self) -> bool {
        match self.metric {
            Metric::Kendall => 2 * self.d >= Metric::Kendall.diameter(self.n),
            Metric::Chebyshev => self.d > Metric::Chebyshev.diameter(self.n),
        }
    }

    /// Exact ball size `B(D)`.
    pub fn ball(&self) -> Result<BigUint> {
        match self.metric {
            Metric::Kendall => Ok(kendall_ball_exact(self.n, self.d)),
            Metric::Chebyshev => chebyshev_ball_exact(self.n, self.d),
        }
    }

    pub fn space_size(&self) -> BigUint {
        factorial(self.n)
    }
}

/// Sphere-covering bound: any `D`-cover has at least `n!/B(D)` codewords.
pub fn sphere_covering_lower(q: &DistortionQuery) -> Result<BigRational> {
    Ok(big_ratio(q.space_size(), q.ball()?))
}

/// Stein-Lovasz bound `(n!/B(D)) (1 + ln B(D))`: the prefactor is exact,
/// the logarithm necessarily a float.
#[derive(Clone, Debug)]
pub struct SteinBound {
    pub prefactor: BigRational,
    pub ln_ball: f64,
}

impl SteinBound {
    pub fn value(&self) -> f64 {
        self.prefactor.to_f64().unwrap_or(f64::INFINITY) * (1.0 + self.ln_ball)
    }
}

pub fn stein_upper(q: &DistortionQuery) -> Result<SteinBound> {
    let ball = q.ball()?;
    Ok(SteinBound {
        prefactor: big_ratio(q.space_size(), ball.clone()),
        ln_ball: ln_biguint(&ball),
    })
}

/// Random-code bound `ceil(n! ln(n!) / B(D))`.
///
/// `ln(n!)` enters as an exact dyadic stand-in for the float value, so the
/// ceiling is computed in exact arithmetic; the result can be off only if
/// the true value sits within ~1e-13 relative of an integer.
pub fn probabilistic_upper(q: &DistortionQuery) -> Result<BigUint> {
    let ln_space = dyadic_from_f64(ln_biguint(&q.space_size()));
    let m = big_ratio(q.space_size(), q.ball()?) * ln_space;
    Ok(ceil_ratio(&m))
}

/// Average-distortion converse: strictly more than `n!/(B(D)(D+1))`
/// codewords are needed when the distortion *average* must stay under `D`.
pub fn average_lower(q: &DistortionQuery) -> Result<BigRational> {
    let denom = q.ball()? * BigUint::from(q.d + 1);
    Ok(big_ratio(q.space_size(), denom))
}

/// Per-symbol views of a code size `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateView {
    /// `lg(M) / n`.
    pub rate: f64,
    /// `lg(M)/n - lg(n!)/n`, the excess over the space entropy.
    pub excess: f64,
}

pub fn rate_views(m: &BigRational, n: usize) -> RateView {
    let rate = lg_ratio(m) / n as f64;
    RateView {
        rate,
        excess: rate - lg_biguint(&factorial(n)) / n as f64,
    }
}

pub fn rate_views_int(m: &BigUint, n: usize) -> RateView {
    rate_views(&BigRational::from_integer(m.clone().into()), n)
}

/// Whether a size bound constrains the worst-case optimum `M^` or the
/// average-distortion optimum `M-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Worst,
    Average,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Worst => "worst",
            Basis::Average => "average",
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "worst" | "worst-case" => Ok(Basis::Worst),
            "average" | "avg" => Ok(Basis::Average),
            other => Err(Error::Parse(format!("unknown basis {other:?}"))),
        }
    }
}

/// The certified window on the optimal code size for one query, with the
/// formulas that produced each side.
#[derive(Clone, Debug)]
pub struct BoundSet {
    pub basis: Basis,
    pub lower_size: BigRational,
    pub upper_size: BigRational,
    pub lower_rate: RateView,
    pub upper_rate: RateView,
    pub lower_tag: &'static str,
    pub upper_tag: &'static str,
}

/// Best certified sandwich on `M^(D)` (worst basis) or `M-(D)` (average).
///
/// Any worst-case cover meets the average budget too, so the upper side is
/// shared: the smaller of the Stein and random-code bounds.  Stein's value
/// is irrational; it enters as its dyadic float image, which is what the
/// comparison and the reported rate use anyway.
pub fn bound_set(q: &DistortionQuery, basis: Basis) -> Result<BoundSet> {
    let (lower_size, lower_tag) = match basis {
        Basis::Worst => (sphere_covering_lower(q)?, "sphere-covering"),
        Basis::Average => (average_lower(q)?, "average-converse"),
    };
    let stein = dyadic_from_f64(stein_upper(q)?.value());
    let prob = BigRational::from_integer(probabilistic_upper(q)?.into());
    let (upper_size, upper_tag) = if stein <= prob {
        (stein, "stein")
    } else {
        (prob, "probabilistic")
    };
    Ok(BoundSet {
        basis,
        lower_rate: rate_views(&lower_size, q.n),
        upper_rate: rate_views(&upper_size, q.n),
        lower_size,
        upper_size,
        lower_tag,
        upper_tag,
    })
}

/// `-lg((1+delta)^(1+delta) / delta^delta)`, the excess-rate kernel shared
/// by most Kendall bounds.
fn excess_kernel(delta: f64) -> f64 {
    debug_assert!(delta > 0.0);
    -((1.0 + delta) * (1.0 + delta).log2() - delta * delta.log2())
}

/// Finite-`n` lower bounds on the Kendall excess rate, worst-case and
/// average-distortion variants.
#[derive(Clone, Copy, Debug)]
pub struct KendallExcessLower {
    pub worst: f64,
    pub average: f64,
}

pub fn kendall_excess_lower(n: usize, d: u64) -> Result<KendallExcessLower> {
    check_kendall_domain(n, d)?;
    let worst = excess_kernel(d as f64 / n as f64);
    Ok(KendallExcessLower {
        worst,
        average: worst - (n as f64).log2() / n as f64,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KendallUpperBranch {
    /// `delta < 1`: kernel plus `(3 lg n + 12) / (2n)`.
    SubLinear,
    /// `delta >= 1`: `-lg m + lg(n e^m ln m)/n` with `m = floor(1+delta)`.
    Linear,
}

#[derive(Clone, Copy, Debug)]
pub struct KendallExcessUpper {
    pub value: f64,
    pub branch: KendallUpperBranch,
}

/// Finite-`n` upper bound on the Kendall excess rate (worst-case, hence
/// also average).
pub fn kendall_excess_upper(n: usize, d: u64) -> Result<KendallExcessUpper> {
    check_kendall_domain(n, d)?;
    if d < n as u64 {
        Ok(KendallExcessUpper {
            value: kendall_excess_upper_sublinear(n, d)?,
            branch: KendallUpperBranch::SubLinear,
        })
    } else {
        Ok(KendallExcessUpper {
            value: kendall_excess_upper_linear(n, d)?,
            branch: KendallUpperBranch::Linear,
        })
    }
}

/// The `delta < 1` branch of the upper bound, exposed through `delta = 1`
/// so figure data can show both curves where they hand off.
pub fn kendall_excess_upper_sublinear(n: usize, d: u64) -> Result<f64> {
    check_kendall_domain(n, d)?;
    if d > n as u64 {
        return Err(Error::Domain(format!(
            "sublinear branch needs delta <= 1, got D = {d} at n = {n}"
        )));
    }
    let nf = n as f64;
    Ok(excess_kernel(d as f64 / nf) + (3.0 * nf.log2() + 12.0) / (2.0 * nf))
}

/// The `delta >= 1` branch of the upper bound.
pub fn kendall_excess_upper_linear(n: usize, d: u64) -> Result<f64> {
    check_kendall_domain(n, d)?;
    if d < n as u64 {
        return Err(Error::Domain(format!(
            "linear branch needs delta >= 1, got D = {d} at n = {n}"
        )));
    }
    let nf = n as f64;
    let m = (1 + d / n as u64) as f64;
    Ok(-m.log2() + (nf.log2() + m * LG_E + m.ln().log2()) / nf)
}

fn check_kendall_domain(n: usize, d: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    if d < 1 || d >= Metric::Kendall.diameter(n) {
        return Err(Error::Domain(format!(
            "need 1 <= D < n(n-1)/2, got D = {d} at n = {n}"
        )));
    }
    Ok(())
}

/// Asymptotic distortion regimes for the Kendall metric.
#[derive(Clone, Copy, Debug)]
pub enum Regime {
    /// `D = cn + O(1)`, `c > 0`.
    Small { c: f64 },
    /// `D = c n^(1+alpha) + O(n)`, `c > 0`, `0 < alpha < 1`.
    Medium { c: f64, alpha: f64 },
    /// `D = c n^2 + O(n)`, `0 < c < 1/2`.
    Large { c: f64 },
}

/// Leading-order excess-rate window plus the error terms dropped from it.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticWindow {
    pub lower: f64,
    pub upper: f64,
    pub lower_error: &'static str,
    pub upper_error: &'static str,
}

pub fn kendall_asymptotic(regime: Regime, n: usize) -> Result<AsymptoticWindow> {
    let nf = n as f64;
    match regime {
        Regime::Small { c } => {
            if !(c > 0.0) {
                return Err(Error::Domain(format!("small regime needs c > 0, got {c}")));
            }
            let v = excess_kernel(c);
            Ok(AsymptoticWindow {
                lower: v,
                upper: v,
                lower_error: "O(lg n / n)",
                upper_error: "O(lg n / n)",
            })
        }
        Regime::Medium { c, alpha } => {
            if !(c > 0.0) || !(0.0 < alpha && alpha < 1.0) {
                return Err(Error::Domain(format!(
                    "medium regime needs c > 0 and 0 < alpha < 1, got c = {c}, alpha = {alpha}"
                )));
            }
            let scale = c * nf.powf(alpha);
            Ok(AsymptoticWindow {
                lower: -(std::f64::consts::E * scale).log2(),
                upper: -scale.log2(),
                lower_error: "O(n^-alpha)",
                upper_error: "O(n^-alpha + n^(alpha-1))",
            })
        }
        Regime::Large { c } => {
            check_large_c(c)?;
            let lower = -(std::f64::consts::E * c * nf).log2();
            Ok(AsymptoticWindow {
                lower,
                upper: lower + (1.0 + c) * LG_E,
                lower_error: "O(1/n)",
                upper_error: "O(lg n / n)",
            })
        }
    }
}

/// The previously published large-distortion window, for comparison:
/// `-lg(ecn) - 1 <= A <= -lg(n / (e ceil(1/(2c))))`, errors `O(lg n/n)`.
pub fn wang_large_distortion(c: f64, n: usize) -> Result<(f64, f64)> {
    check_large_c(c)?;
    let nf = n as f64;
    let lower = -(std::f64::consts::E * c * nf).log2() - 1.0;
    let upper = -(nf / (std::f64::consts::E * (1.0 / (2.0 * c)).ceil())).log2();
    Ok((lower, upper))
}

fn check_large_c(c: f64) -> Result<()> {
    if !(0.0 < c && c < 0.5) {
        return Err(Error::Domain(format!(
            "large regime needs 0 < c < 1/2, got {c}"
        )));
    }
    Ok(())
}

/// Leading terms of the Chebyshev rate bounds at relative distortion
/// `delta`; both branch pairs meet at `delta = 1/2`.
#[derive(Clone, Copy, Debug)]
pub struct ChebyshevRateWindow {
    pub lower: f64,
    pub upper: f64,
}

pub fn chebyshev_rate_leading(delta: f64) -> Result<ChebyshevRateWindow> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < delta < 1, got {delta}"
        )));
    }
    let lower = if delta <= 0.5 {
        (1.0 / (2.0 * delta)).log2() + 2.0 * delta * (std::f64::consts::E / 2.0).log2()
    } else {
        2.0 * delta * delta.log2() + 2.0 * (1.0 - delta) * LG_E
    };
    let upper = if delta <= 0.5 {
        (1.0 / (2.0 * delta)).log2() + 2.0 * delta
    } else {
        2.0 * (1.0 - delta)
    };
    Ok(ChebyshevRateWindow { lower, upper })
}

/// Chebyshev rate bounds for a concrete `(n, D)`; leading terms with the
/// dropped error order attached.
pub fn chebyshev_rate_bounds(n: usize, d: u64) -> Result<AsymptoticWindow> {
    if n < 2 || d < 1 || d >= n as u64 {
        return Err(Error::Domain(format!(
            "need n >= 2 and 1 <= D < n, got n = {n}, D = {d}"
        )));
    }
    let w = chebyshev_rate_leading(d as f64 / n as f64)?;
    Ok(AsymptoticWindow {
        lower: w.lower,
        upper: w.upper,
        lower_error: "O(lg n / n)",
        upper_error: "O(lg n / n)",
    })
}
