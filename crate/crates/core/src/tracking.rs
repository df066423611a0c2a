//! Discrete boundary-tracking law: the distance recursion between stances,
//! the steering angle that realizes a commanded distance change, and the
//! gain selection that keeps that steering angle feasible.

use log::debug;

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, CenterDistance};

/// Safety factor turning the strict gain bounds into closed ones.
pub const GAIN_SAFETY: f64 = 0.99;
/// Rounding slack accepted before an out-of-range sine is an error.
pub const SINE_SLACK: f64 = 1e-12;
/// Default `q < lambda / ratio` check for the simplified recursion.
pub const SIMPLIFIED_RATIO: f64 = 10.0;

/// Gains of the distance-feedback law `f = -K (rho - rho_c)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrackingGains {
    /// Nominal gain `K`, in `(0, 2)`.
    pub gain: f64,
    /// Desired distance to the curve.
    pub rho_c: f64,
    /// Clamp `K` per stance so that the steering equation stays solvable.
    #[serde(default = "default_true")]
    pub adaptive: bool,
}

fn default_true() -> bool {
    true
}

impl TrackingGains {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain > 0.0 && self.gain < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "tracking gain {} outside (0, 2)",
                self.gain
            )));
        }
        if !(self.rho_c >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "desired distance {} is negative",
                self.rho_c
            )));
        }
        Ok(())
    }
}

/// Snapshot of the tracking variables at one touchdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingState {
    pub rho: f64,
    pub lambda: CenterDistance,
    pub theta: f64,
    pub f: f64,
    pub step: f64,
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Union of closed intervals of distance changes `f` that admit a steering angle.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet(pub Vec<Interval>);

impl FeasibleSet {
    pub fn contains(&self, f: f64) -> bool {
        self.0.iter().any(|i| i.contains(f))
    }
}

/// Values of `f` for which `|sin theta| <= 1` in the steering equation.
///
/// For `lambda > 0` this is
/// `[-(2 lambda + q), min(-q, q - 2 lambda)] U [max(-q, q - 2 lambda), q]`.
/// A concave boundary (`lambda < 0`) gives the mirror image `f -> -f`.
pub fn feasible_f_intervals(q: f64, lambda: CenterDistance) -> FeasibleSet {
    let l = match lambda {
        CenterDistance::Infinite => return FeasibleSet(vec![Interval { lo: -q, hi: q }]),
        CenterDistance::Finite(l) => l,
    };
    let a = l.abs();
    let lower = Interval {
        lo: -(2.0 * a + q),
        hi: (-q).min(q - 2.0 * a),
    };
    let upper = Interval {
        lo: (-q).max(q - 2.0 * a),
        hi: q,
    };
    let flip = |i: Interval| {
        if l > 0.0 {
            i
        } else {
            Interval {
                lo: -i.hi,
                hi: -i.lo,
            }
        }
    };
    FeasibleSet(vec![flip(lower), flip(upper)])
}

/// Gain that keeps `f = -K rho_err` inside the feasible set.
pub fn select_gain(rho_err: f64, q: f64, lambda: CenterDistance, k_nominal: f64) -> Result<f64> {
    let room = match lambda {
        CenterDistance::Infinite => q,
        CenterDistance::Finite(l) => {
            let two_lambda = 2.0 * l.abs();
            if q >= two_lambda {
                return Err(Error::StepTooLarge { q, two_lambda });
            }
            q.min(two_lambda - q)
        }
    };
    let e = rho_err.abs();
    if e < 0.5 * room {
        return Ok(k_nominal);
    }
    Ok(k_nominal.min(GAIN_SAFETY * room / e))
}

/// `sin theta` required for the distance change `f` over a chord `q`.
pub fn steering_sine(f: f64, q: f64, lambda: CenterDistance) -> f64 {
    match lambda {
        CenterDistance::Infinite => -f / q,
        CenterDistance::Finite(l) => (-f * f - 2.0 * l * f + q * q) / (2.0 * l * q),
    }
}

/// Principal-branch steering angle realizing the distance change `f`.
pub fn solve_theta(f: f64, q: f64, lambda: CenterDistance) -> Result<f64> {
    let s = steering_sine(f, q, lambda);
    if !s.is_finite() || s.abs() > 1.0 + SINE_SLACK {
        return Err(Error::NoSolution(s));
    }
    Ok(s.clamp(-1.0, 1.0).asin())
}

/// Exact cosine-law update of the distance after a chord `q` at steering angle `theta`.
pub fn step_distance_update(rho: f64, theta: f64, q: f64, kappa: f64) -> f64 {
    let s = theta.sin();
    if kappa == 0.0 {
        return rho - q * s;
    }
    let lambda = rho + 1.0 / kappa;
    let next = lambda.signum() * (lambda * lambda - 2.0 * lambda * q * s + q * q).sqrt();
    // rho' - rho = (lambda'^2 - lambda^2) / (lambda' + lambda), free of cancellation.
    rho + (q * q - 2.0 * lambda * q * s) / (next + lambda)
}

/// Lab angle of the chord, `delta = zeta - theta`.
pub fn delta_from_theta(zeta: f64, theta: f64) -> f64 {
    normalize_angle(zeta - theta)
}

/// Result of the small-step distance recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedStep {
    /// `rho_{i+1} - rho_c`.
    pub error_next: f64,
    /// Whether `q < lambda / ratio` held.
    pub assumption_ok: bool,
}

/// `rho_{i+1} - rho_c = (rho - rho_c) + q^2 / (2 lambda) - q sin theta`.
pub fn simplified_update(
    rho: f64,
    theta: f64,
    q: f64,
    lambda: CenterDistance,
    rho_c: f64,
) -> SimplifiedStep {
    simplified_update_sine(rho, theta.sin(), q, lambda, rho_c, SIMPLIFIED_RATIO)
}

/// [`simplified_update`] in terms of `sin theta`, with a configurable `q << lambda` ratio.
pub fn simplified_update_sine(
    rho: f64,
    sin_theta: f64,
    q: f64,
    lambda: CenterDistance,
    rho_c: f64,
    ratio: f64,
) -> SimplifiedStep {
    let (drift, assumption_ok) = match lambda {
        CenterDistance::Infinite => (0.0, true),
        CenterDistance::Finite(l) => (q * q / (2.0 * l), q < l.abs() / ratio),
    };
    if !assumption_ok {
        debug!(
            "simplified distance recursion used with q = {q} not small against lambda = {lambda:?}"
        );
    }
    SimplifiedStep {
        error_next: (rho - rho_c) + drift - q * sin_theta,
        assumption_ok,
    }
}

/// Desired `sin theta` of the simplified model, `q sin theta = q^2 / (2 lambda) - f`.
pub fn simplified_steering_sine(f: f64, q: f64, lambda: CenterDistance) -> f64 {
    match lambda {
        CenterDistance::Infinite => -f / q,
        CenterDistance::Finite(l) => q / (2.0 * l) - f / q,
    }
}
