//! Per-stance leg synthesis with the chord length held constant.
//!
//! Holding `q` fixed pins the sweep angle `phi = 2 asin(q / 2 eta_td)`, so
//! the chord direction is an affine function of the leg angle and the spring
//! coefficient `b` is whatever makes the stance produce that chord. When the
//! desired steering angle needs a leg angle outside `[alpha_min, alpha_max]`
//! the approximation method picks the admissible angle whose `sin(theta)` is
//! closest to the desired one and reports the residual.

use std::f64::consts::FRAC_PI_2;

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, CenterDistance, ClosestFrame};
use crate::stance::{
    chord_length, stance_profile, ComState, LegParams, Side, StancePlan, Touchdown,
};

/// Distance kept from the `b -> 0` limit of the achievable leg angles.
pub const ACHIEVABLE_MARGIN: f64 = 1e-3;
/// Number of seed points for the search over the leg angle.
pub const SEARCH_SEEDS: usize = 64;
/// `|sin theta(alpha) - sin theta_target|` below which a leg angle counts as exact.
pub const EXACT_RESIDUAL: f64 = 1e-12;

/// Chord produced at leg angle `alpha` with fixed stiffness.
pub fn q_of_alpha(alpha: f64, eta_td: f64, b: f64, v: f64, m: f64) -> Result<f64> {
    let td = Touchdown {
        alpha,
        eta_td,
        stiffness: b,
        speed: v,
        mass: m,
    };
    Ok(chord_length(eta_td, stance_profile(&td)?.sweep))
}

/// Supremum of the chord over all stiffnesses: the straight pass `2 eta cos(alpha)`.
pub fn chord_supremum(alpha: f64, eta_td: f64) -> f64 {
    2.0 * eta_td * alpha.cos()
}

/// Largest leg angle at which the chord `q` is still attainable.
pub fn achievable_alpha_max(q: f64, eta_td: f64) -> f64 {
    (q / (2.0 * eta_td)).clamp(-1.0, 1.0).acos() - ACHIEVABLE_MARGIN
}

/// Stiffness that makes the stance at `alpha` produce the chord `q_target`.
///
/// `q` decreases monotonically in `b`, so the root is bisected in `ln b`.
pub fn b_for_q(alpha: f64, q_target: f64, eta_td: f64, v: f64, m: f64) -> Result<f64> {
    if !(q_target > 0.0) || q_target >= chord_supremum(alpha, eta_td) {
        return Err(Error::Unachievable { alpha, q_target });
    }
    let scale = m * v * v / (eta_td * eta_td);
    let residual =
        |ln_b: f64| -> Result<f64> { Ok(q_of_alpha(alpha, eta_td, ln_b.exp(), v, m)? - q_target) };
    let (mut lo, mut hi) = ((scale * 1e-8).ln(), (scale * 1e8).ln());
    if !(residual(lo)? > 0.0 && residual(hi)? < 0.0) {
        return Err(Error::Unachievable { alpha, q_target });
    }
    // 1e-12 relative in b is 1e-12 absolute in ln b.
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Smallest center distance the cone can follow:
/// `lambda > q / (2 sin((alpha_max - alpha_min) / 2))`.
pub fn min_turn_radius(q: f64, alpha_min: f64, alpha_max: f64) -> f64 {
    q / (2.0 * (0.5 * (alpha_max - alpha_min)).sin())
}

/// Ultimate bound on `|rho - rho_c|` under the approximation method: `M q / (1 - |1 - K|)`.
pub fn neighborhood_bound(m_sup: f64, q: f64, k: f64) -> f64 {
    if m_sup == 0.0 {
        return 0.0;
    }
    m_sup * q / (1.0 - (1.0 - k).abs())
}

/// Closest-point rotation per stance, `gamma = 2 asin(q / 2 lambda)`.
pub fn cone_gamma(q: f64, lambda: CenterDistance) -> Result<f64> {
    match lambda {
        CenterDistance::Infinite => Ok(0.0),
        CenterDistance::Finite(l) => {
            let two_lambda = 2.0 * l.abs();
            if q >= two_lambda {
                return Err(Error::StepTooLarge { q, two_lambda });
            }
            Ok(2.0 * (q / two_lambda).asin())
        }
    }
}

/// Chord directions reachable at fixed `q` for `alpha` in a range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    /// Entry velocity heading.
    pub v_ref: f64,
    pub side: Side,
    pub alpha_range: [f64; 2],
    pub q: f64,
    pub sweep: f64,
    pub gamma: Option<f64>,
}

impl Cone {
    /// Lab angle of the chord produced at `alpha`.
    pub fn chord_heading(&self, alpha: f64) -> f64 {
        normalize_angle(self.v_ref + self.side.sign() * (FRAC_PI_2 - alpha - 0.5 * self.sweep))
    }

    /// Chord headings at `alpha_range[0]` and `alpha_range[1]`.
    pub fn edges(&self) -> [f64; 2] {
        [
            self.chord_heading(self.alpha_range[0]),
            self.chord_heading(self.alpha_range[1]),
        ]
    }

    pub fn mid_alpha(&self) -> f64 {
        0.5 * (self.alpha_range[0] + self.alpha_range[1])
    }

    /// The next stance's cone: the mirror image about the chord taken.
    pub fn reflect(&self, chord_heading: f64) -> Cone {
        Cone {
            v_ref: normalize_angle(2.0 * chord_heading - self.v_ref),
            side: self.side.other(),
            ..*self
        }
    }
}

/// Full cone and the two sub-cones `C^A = [a_min, a_max - gamma]`, `C^B = [a_min + gamma, a_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cones {
    pub full: Cone,
    pub sub_a: Cone,
    pub sub_b: Cone,
}

pub fn build_cones(
    state: &ComState,
    params: &LegParams,
    q: f64,
    eta_td: f64,
    lambda: CenterDistance,
) -> Result<Cones> {
    let sweep = fixed_sweep(q, eta_td)?;
    let gamma = cone_gamma(q, lambda)?;
    let range = params.alpha_max - params.alpha_min;
    if gamma >= range {
        return Err(Error::ConeEmpty { gamma, range });
    }
    let full = Cone {
        v_ref: state.heading,
        side: state.side_next,
        alpha_range: [params.alpha_min, params.alpha_max],
        q,
        sweep,
        gamma: Some(gamma),
    };
    Ok(Cones {
        full,
        sub_a: Cone {
            alpha_range: [params.alpha_min, params.alpha_max - gamma],
            ..full
        },
        sub_b: Cone {
            alpha_range: [params.alpha_min + gamma, params.alpha_max],
            ..full
        },
    })
}

fn fixed_sweep(q: f64, eta_td: f64) -> Result<f64> {
    if !(q > 0.0 && q < 2.0 * eta_td) {
        return Err(Error::InvalidParameter(format!(
            "chord {q} must lie in (0, 2 eta_td = {})",
            2.0 * eta_td
        )));
    }
    Ok(2.0 * (q / (2.0 * eta_td)).asin())
}

/// Gains reported by one approximation step.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ApproxGains {
    pub k: f64,
    /// Backstepping gain; zero when the step was exact.
    pub k_tilde: f64,
    /// `|sin theta - sin theta_desired|` left by the chosen leg angle.
    pub m_tilde: f64,
    /// Running supremum of `m_tilde`.
    pub m_sup: f64,
}

/// What the tracking layer asks of the leg at one stance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxRequest {
    /// Desired `sin theta`; may lie outside `[-1, 1]` when the step is infeasible.
    pub sin_target: f64,
    /// `rho_i - rho_c`.
    pub error: f64,
    /// Desired error for this stance set at the previous one.
    pub rho_tilde: f64,
    pub k: f64,
    pub m_sup: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxOutcome {
    pub plan: StancePlan,
    /// Steering angle the plan realizes in the current frame.
    pub theta: f64,
    pub exact: bool,
    pub gains: ApproxGains,
}

/// Everything needed to turn a steering angle into a leg plan at one touchdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringContext {
    pub frame: ClosestFrame,
    pub heading: f64,
    pub side: Side,
    pub q: f64,
    pub eta_td: f64,
    pub speed: f64,
    pub mass: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    sweep: f64,
}

impl SteeringContext {
    pub fn new(
        frame: ClosestFrame,
        state: &ComState,
        params: &LegParams,
        q: f64,
        eta_td: f64,
    ) -> Result<Self> {
        Ok(SteeringContext {
            frame,
            heading: state.heading,
            side: state.side_next,
            q,
            eta_td,
            speed: state.v,
            mass: params.mass,
            alpha_min: params.alpha_min,
            alpha_max: params.alpha_max,
            sweep: fixed_sweep(q, eta_td)?,
        })
    }

    pub fn sweep(&self) -> f64 {
        self.sweep
    }

    /// Leg angles that are both admissible and able to produce the chord.
    pub fn alpha_range(&self) -> Result<(f64, f64)> {
        let hi = self
            .alpha_max
            .min(achievable_alpha_max(self.q, self.eta_td));
        if hi <= self.alpha_min {
            return Err(Error::Unachievable {
                alpha: self.alpha_min,
                q_target: self.q,
            });
        }
        Ok((self.alpha_min, hi))
    }

    pub fn chord_heading(&self, alpha: f64) -> f64 {
        normalize_angle(self.heading + self.side.sign() * (FRAC_PI_2 - alpha - 0.5 * self.sweep))
    }

    pub fn theta_of_alpha(&self, alpha: f64) -> f64 {
        self.frame.theta_of_heading(self.chord_heading(alpha))
    }

    /// Leg angle (unbounded) whose chord has steering angle `theta`.
    pub fn alpha_for_theta(&self, theta: f64) -> f64 {
        let rel =
            self.side.sign() * normalize_angle(self.frame.chord_heading(theta) - self.heading);
        FRAC_PI_2 - 0.5 * self.sweep - rel
    }

    /// Stance plan realizing the chord at `alpha`.
    pub fn plan(&self, alpha: f64) -> Result<StancePlan> {
        let b = b_for_q(alpha, self.q, self.eta_td, self.speed, self.mass)?;
        StancePlan::new(self.side, alpha, b, self.eta_td, self.speed, self.mass)
    }

    /// Exact leg plan for the steering angle `theta`, if one is admissible.
    pub fn inverse_solve(&self, theta: f64) -> Result<StancePlan> {
        let (lo, hi) = self.alpha_range()?;
        let alpha = self.alpha_for_theta(theta);
        if !(alpha >= lo && alpha <= hi) {
            return Err(Error::NoConstrainedSolution {
                theta,
                alpha_min: lo,
                alpha_max: hi,
            });
        }
        self.plan(alpha)
    }

    /// Leg angle the approximation method prefers among several exact ones.
    fn preferred_alpha(&self, lo: f64, hi: f64) -> f64 {
        let mid = 0.5 * (lo + hi);
        let gamma = match cone_gamma(self.q, self.frame.lambda) {
            Ok(g) if g < hi - lo => g,
            _ => return mid,
        };
        // Keep room for the next stance's gamma on the side the curve turns to.
        if self.frame.chirality.sign() * self.side.sign() < 0.0 {
            0.5 * (lo + hi - gamma)
        } else {
            0.5 * (lo + gamma + hi)
        }
    }

    /// Leg angle minimizing `|sin theta(alpha) - sin_target|` over the admissible range.
    pub fn approx_step(&self, req: &ApproxRequest) -> Result<ApproxOutcome> {
        let (lo, hi) = self.alpha_range()?;
        let d = |a: f64| self.theta_of_alpha(a).sin() - req.sin_target;
        let n = SEARCH_SEEDS;
        let seeds: Vec<f64> = (0..=n)
            .map(|j| lo + (hi - lo) * j as f64 / n as f64)
            .collect();
        let values: Vec<f64> = seeds.iter().map(|&a| d(a)).collect();

        let mut roots = Vec::new();
        for j in 0..n {
            let (a0, a1, v0, v1) = (seeds[j], seeds[j + 1], values[j], values[j + 1]);
            if v0 == 0.0 {
                roots.push(a0);
            } else if v0.signum() != v1.signum() && v1 != 0.0 {
                roots.push(bisect(&d, a0, a1, v0));
            }
        }
        if values[n] == 0.0 {
            roots.push(seeds[n]);
        }
        let preferred = self.preferred_alpha(lo, hi);
        let best_root = roots
            .into_iter()
            .filter(|&a| d(a).abs() <= EXACT_RESIDUAL)
            .min_by(|a, b| (a - preferred).abs().total_cmp(&(b - preferred).abs()));

        let (alpha, exact) = match best_root {
            Some(a) => (a, true),
            None => {
                let j = (0..=n)
                    .min_by(|&x, &y| values[x].abs().total_cmp(&values[y].abs()))
                    .expect("seeds");
                let a0 = seeds[j.saturating_sub(1)];
                let a1 = seeds[(j + 1).min(n)];
                let a = golden_min(|a| d(a).abs(), a0, a1);
                let a = if d(seeds[j]).abs() < d(a).abs() {
                    seeds[j]
                } else {
                    a
                };
                (a, d(a).abs() <= EXACT_RESIDUAL)
            }
        };

        let theta = self.theta_of_alpha(alpha);
        if theta.abs() > FRAC_PI_2 {
            warn!("chosen steering angle {theta} leaves (-pi/2, pi/2)");
        }
        let residual = theta.sin() - req.sin_target;
        let (k_tilde, m_tilde) = if exact {
            (0.0, 0.0)
        } else {
            let denom = req.error - req.rho_tilde;
            let k_tilde = if denom == 0.0 {
                f64::INFINITY.copysign(residual)
            } else {
                residual * self.q / denom
            };
            (k_tilde, residual.abs())
        };
        Ok(ApproxOutcome {
            plan: self.plan(alpha)?,
            theta,
            exact,
            gains: ApproxGains {
                k: req.k,
                k_tilde,
                m_tilde,
                m_sup: req.m_sup.max(m_tilde),
            },
        })
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let sa = fa.signum();
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    [a, b, x]
        .into_iter()
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap_or(x)
}
