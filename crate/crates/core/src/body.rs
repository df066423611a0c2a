//! Body posture between stances: targets that converge to an alternating
//! gait, and the minimum-effort torque that reaches them within one stance.
//!
//! The body is a free rotor, `sigma' = p / I`, `p' = tau`. Minimizing the
//! integral of `tau^2` with both endpoints fixed gives an affine torque
//! `tau(t) = (A2 - A1 t / I) / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stance::{heading_increment, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyState {
    /// Orientation (rad), unwrapped.
    pub sigma: f64,
    /// Angular momentum (kg m^2/s).
    pub p_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PostureGains {
    /// Target body angle relative to the heading (rad).
    pub c1: f64,
    /// Target angular momentum magnitude (kg m^2/s).
    pub c2: f64,
    pub k4: f64,
    pub k5: f64,
}

impl Default for PostureGains {
    fn default() -> Self {
        PostureGains {
            c1: 0.0,
            c2: 0.0,
            k4: 0.5,
            k5: 0.5,
        }
    }
}

impl PostureGains {
    /// Gains must lie in `(0, 1]`; one is the deadbeat case.
    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("k4", self.k4), ("k5", self.k5)] {
            if !(k > 0.0 && k <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {k} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Body state to reach by the end of the coming stance.
///
/// On a right stance `(sigma - heading, p)` is pulled toward `(-C1, -C2)`
/// and on a left stance toward `(C1, C2)`:
/// `x_target + s C = (1 - K) (x - s C)`, with `s = +1` for right.
pub fn posture_targets(
    body: &BodyState,
    heading: f64,
    gains: &PostureGains,
    alpha: f64,
    sweep: f64,
    side: Side,
) -> BodyState {
    let s = side.sign();
    let rel = body.sigma - heading;
    let rel_target = -s * gains.c1 + (1.0 - gains.k4) * (rel - s * gains.c1);
    let p_target = -s * gains.c2 + (1.0 - gains.k5) * (body.p_sigma - s * gains.c2);
    BodyState {
        sigma: body.sigma + (rel_target - rel) + heading_increment(alpha, sweep, side),
        p_sigma: p_target,
    }
}

/// Coefficients `(A1, A2)` of the optimal torque from `body` to `target` in time `t`.
pub fn torque_coeffs(body: &BodyState, target: &BodyState, t: f64, inertia: f64) -> (f64, f64) {
    let ds = target.sigma - body.sigma;
    let (p0, p1) = (body.p_sigma, target.p_sigma);
    let i = inertia;
    let a1 = 24.0 * i * i * ds / t.powi(3) - 12.0 * i * (p1 + p0) / (t * t);
    let a2 = 12.0 * i * ds / (t * t) - 4.0 * p1 / t - 8.0 * p0 / t;
    (a1, a2)
}

/// `tau(t) = (A2 - A1 t / I) / 2` on `[0, duration]`.
pub fn torque(t: f64, a1: f64, a2: f64, inertia: f64, duration: f64) -> Result<f64> {
    if !(0.0..=duration).contains(&t) {
        return Err(Error::OutOfWindow { t, duration });
    }
    Ok(0.5 * (a2 - a1 * t / inertia))
}

/// Body state after applying the affine torque for time `t`.
pub fn integrate_body(body: &BodyState, a1: f64, a2: f64, t: f64, inertia: f64) -> BodyState {
    let i = inertia;
    BodyState {
        sigma: body.sigma + body.p_sigma * t / i + a2 * t * t / (4.0 * i)
            - a1 * t.powi(3) / (12.0 * i * i),
        p_sigma: body.p_sigma + 0.5 * a2 * t - 0.25 * a1 * t * t / i,
    }
}

/// `int_0^T tau^2 dt` for the affine torque.
pub fn control_cost(a1: f64, a2: f64, t: f64, inertia: f64) -> f64 {
    let a = a1 / inertia;
    0.25 * (a2 * a2 * t - a2 * a * t * t + a * a * t.powi(3) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: f64 = 4e-7;

    #[test]
    fn deadbeat_right_stance() {
        let g = PostureGains {
            c1: 0.2,
            c2: 3e-6,
            k4: 1.0,
            k5: 1.0,
        };
        let body = BodyState {
            sigma: 1.3,
            p_sigma: -7e-6,
        };
        let (heading, alpha, sweep) = (0.9, 0.6, 0.95);
        let t = posture_targets(&body, heading, &g, alpha, sweep, Side::Right);
        let next_heading = heading + heading_increment(alpha, sweep, Side::Right);
        assert!((t.sigma - next_heading + 0.2).abs() < 1e-15);
        assert_eq!(t.p_sigma, -3e-6);
    }

    #[test]
    fn converged_state_alternates() {
        let g = PostureGains {
            c1: 0.2,
            c2: 3e-6,
            k4: 0.3,
            k5: 0.6,
        };
        let heading = 0.4;
        let body = BodyState {
            sigma: heading + 0.2,
            p_sigma: 3e-6,
        };
        let t = posture_targets(&body, heading, &g, 0.7, 0.9, Side::Right);
        let h1 = heading + heading_increment(0.7, 0.9, Side::Right);
        assert!((t.sigma - h1 + 0.2).abs() < 1e-15);
        assert!((t.p_sigma + 3e-6).abs() < 1e-20);
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(
            torque_coeffs(
                &BodyState {
                    sigma: 0.0,
                    p_sigma: 0.0
                },
                &BodyState {
                    sigma: 0.0,
                    p_sigma: 0.0
                },
                0.1,
                I
            ),
            (0.0, 0.0)
        );
        let t = 0.08;
        let (a1, a2) = torque_coeffs(
            &BodyState {
                sigma: 0.0,
                p_sigma: 0.0,
            },
            &BodyState {
                sigma: 1.0,
                p_sigma: 0.0,
            },
            t,
            I,
        );
        assert!((a1 - 24.0 * I * I / t.powi(3)).abs() < 1e-25);
        assert!((a2 - 12.0 * I / (t * t)).abs() < 1e-18);
    }

    #[test]
    fn torque_window_and_shape() {
        assert_eq!(torque(0.0, 1.0, 2.0, I, 0.1).unwrap(), 1.0);
        assert_eq!(torque(0.1, 0.0, 2.0, I, 0.1).unwrap(), 1.0);
        assert!(matches!(
            torque(0.11, 0.0, 2.0, I, 0.1),
            Err(Error::OutOfWindow { .. })
        ));
        let (t, a1) = (0.1, 3e-9);
        let a2 = a1 * t / (2.0 * I);
        let early = torque(0.02, a1, a2, I, t).unwrap();
        let late = torque(0.08, a1, a2, I, t).unwrap();
        assert!((early + late).abs() < 1e-18);
    }

    #[test]
    fn lands_on_target() {
        let body = BodyState {
            sigma: 0.3,
            p_sigma: 2e-6,
        };
        let target = BodyState {
            sigma: -0.1,
            p_sigma: -5e-6,
        };
        let t = 0.075;
        let (a1, a2) = torque_coeffs(&body, &target, t, I);
        let end = integrate_body(&body, a1, a2, t, I);
        assert!((end.sigma - target.sigma).abs() < 1e-12);
        assert!((end.p_sigma - target.p_sigma).abs() < 1e-18);
    }

    #[test]
    fn free_rotation_and_cost_examples() {
        let body = BodyState {
            sigma: 0.3,
            p_sigma: 2e-6,
        };
        let end = integrate_body(&body, 0.0, 0.0, 0.1, I);
        assert!((end.sigma - (0.3 + 2e-6 * 0.1 / I)).abs() < 1e-15);
        assert_eq!(end.p_sigma, 2e-6);
        assert_eq!(control_cost(0.0, 0.0, 0.1, I), 0.0);
        // Constant torque c = A2 / 2.
        let c = 4e-6;
        assert!((control_cost(0.0, 2.0 * c, 0.1, I) - c * c * 0.1).abs() < 1e-24);
    }
}
