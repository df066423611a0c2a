//! Direct integration of the stance in Cartesian coordinates about the foot.
//!
//! Classical RK4 with a step tied to the stance time scales. Lift-off is the
//! first return of the leg to its touchdown length after compression; the
//! crossing is located by re-stepping from the last interior state with a
//! Newton iteration on the sub-step length.

use super::{ComState, LegParams, StancePlan};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, unit, Point};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct IntegratorSettings {
    /// RK4 steps per characteristic time `min(1/omega, eta_td/v)`.
    pub steps_per_timescale: f64,
    pub max_steps: usize,
    /// Lift-off location tolerance on the leg length (m).
    pub event_tolerance: f64,
    /// Record a trajectory sample every this many steps (0 disables).
    pub sample_every: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            steps_per_timescale: 2000.0,
            max_steps: 5_000_000,
            event_tolerance: 1e-12,
            sample_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub eta: f64,
    /// Polar angle of the COM about the foot, unwrapped.
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StanceOutcome {
    pub next: ComState,
    pub foot: Point,
    pub q_vec: Point,
    /// Swept angle about the foot measured from the trajectory.
    pub sweep: f64,
    pub duration: f64,
    /// Largest `|E(t) - E0| / E0` along the stance.
    pub energy_drift: f64,
    /// Largest `|p(t) - p0| / |p0|` along the stance.
    pub momentum_drift: f64,
    pub trajectory: Option<Vec<TrajectorySample>>,
}

impl StanceOutcome {
    /// Lab angle of the chord.
    pub fn chord_heading(&self) -> f64 {
        self.q_vec.y.atan2(self.q_vec.x)
    }

    /// Steering angle actually realized in `frame`.
    pub fn theta_achieved(&self, frame: &crate::geometry::ClosestFrame) -> f64 {
        frame.theta_of_heading(self.chord_heading())
    }
}

/// `[x, y, vx, vy]` relative to the foot.
type State = [f64; 4];

struct Spring {
    k_over_m: f64,
    eta_td: f64,
}

impl Spring {
    fn deriv(&self, s: &State) -> State {
        let eta = s[0].hypot(s[1]);
        let a = -self.k_over_m * (eta - self.eta_td) / eta;
        [s[2], s[3], a * s[0], a * s[1]]
    }

    fn rk4(&self, s: &State, h: f64) -> State {
        let add = |a: &State, b: &State, c: f64| {
            [
                a[0] + c * b[0],
                a[1] + c * b[1],
                a[2] + c * b[2],
                a[3] + c * b[3],
            ]
        };
        let k1 = self.deriv(s);
        let k2 = self.deriv(&add(s, &k1, 0.5 * h));
        let k3 = self.deriv(&add(s, &k2, 0.5 * h));
        let k4 = self.deriv(&add(s, &k3, h));
        let mut out = *s;
        for i in 0..4 {
            out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out
    }
}

fn eta_of(s: &State) -> f64 {
    s[0].hypot(s[1])
}

fn radial_rate(s: &State) -> f64 {
    (s[0] * s[2] + s[1] * s[3]) / eta_of(s)
}

/// Integrate one stance from touchdown to lift-off.
pub fn integrate_stance(
    state: &ComState,
    plan: &StancePlan,
    params: &LegParams,
    settings: &IntegratorSettings,
) -> Result<StanceOutcome> {
    let m = params.mass;
    let b = plan.b;
    let eta_td = plan.eta_td;
    if !(b > 0.0 && eta_td > 0.0 && state.v > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "stance needs positive stiffness, length and speed (b = {b}, eta = {eta_td}, v = {})",
            state.v
        )));
    }
    // Right foot lies clockwise of the velocity by alpha, left foot counter-clockwise.
    let leg_angle = state.heading - plan.side.sign() * plan.alpha;
    let foot = state.r + unit(leg_angle) * eta_td;
    let rel0 = state.r - foot;
    let vel0 = unit(state.heading) * state.v;
    let spring = Spring {
        // Force -2 b (eta - eta_td) from V = b (eta - eta_td)^2.
        k_over_m: 2.0 * b / m,
        eta_td,
    };
    let energy = |s: &State| {
        let eta = eta_of(s);
        0.5 * m * (s[2] * s[2] + s[3] * s[3]) + b * (eta - eta_td) * (eta - eta_td)
    };
    let momentum = |s: &State| m * (s[0] * s[3] - s[1] * s[2]);

    let omega = spring.k_over_m.sqrt();
    let timescale = (1.0 / omega).min(eta_td / state.v);
    let h = timescale / settings.steps_per_timescale;

    let mut s: State = [rel0.x, rel0.y, vel0.x, vel0.y];
    let e0 = energy(&s);
    let p0 = momentum(&s);
    let mut energy_drift = 0.0f64;
    let mut momentum_drift = 0.0f64;
    let mut t = 0.0;
    let mut psi = rel0.y.atan2(rel0.x);
    let psi0 = psi;
    let mut samples = (settings.sample_every > 0).then(|| {
        vec![TrajectorySample {
            t: 0.0,
            eta: eta_td,
            psi,
        }]
    });

    let mut steps = 0usize;
    let exit = loop {
        if steps >= settings.max_steps {
            return Err(Error::MaxStepExceeded(settings.max_steps));
        }
        let next = spring.rk4(&s, h);
        steps += 1;
        let eta = eta_of(&next);
        if !eta.is_finite() || eta <= 0.0 || next.iter().any(|x| !x.is_finite()) {
            return Err(Error::IntegrationDiverged(t + h));
        }
        if eta >= eta_td && steps > 1 {
            let (sub, out) = locate_liftoff(&spring, &s, h, settings.event_tolerance)?;
            t += sub;
            break out;
        }
        psi += angle_step(&s, &next);
        s = next;
        t += h;
        energy_drift = energy_drift.max(((energy(&s) - e0) / e0).abs());
        momentum_drift = momentum_drift.max(((momentum(&s) - p0) / p0).abs());
        if let Some(buf) = samples.as_mut() {
            if steps.is_multiple_of(settings.sample_every) {
                buf.push(TrajectorySample { t, eta, psi });
            }
        }
    };
    psi += angle_step(&s, &exit);
    energy_drift = energy_drift.max(((energy(&exit) - e0) / e0).abs());
    momentum_drift = momentum_drift.max(((momentum(&exit) - p0) / p0).abs());
    if let Some(buf) = samples.as_mut() {
        buf.push(TrajectorySample {
            t,
            eta: eta_of(&exit),
            psi,
        });
    }

    let r_exit = foot + Point::new(exit[0], exit[1]);
    let v_exit = Point::new(exit[2], exit[3]);
    Ok(StanceOutcome {
        next: ComState {
            r: r_exit,
            v: v_exit.norm(),
            heading: normalize_angle(v_exit.y.atan2(v_exit.x)),
            side_next: plan.side.other(),
        },
        foot,
        q_vec: r_exit - state.r,
        sweep: (psi - psi0).abs(),
        duration: t,
        energy_drift,
        momentum_drift,
        trajectory: samples,
    })
}

fn angle_step(a: &State, b: &State) -> f64 {
    normalize_angle(b[1].atan2(b[0]) - a[1].atan2(a[0]))
}

/// Sub-step `tau in (0, h]` at which the leg returns to its rest length.
fn locate_liftoff(spring: &Spring, s: &State, h: f64, tol: f64) -> Result<(f64, State)> {
    let residual = |tau: f64| {
        let y = spring.rk4(s, tau);
        (eta_of(&y) - spring.eta_td, y)
    };
    let (mut lo, mut hi) = (0.0, h);
    let (r_hi, _) = residual(hi);
    let r_lo = eta_of(s) - spring.eta_td;
    // Secant start, then Newton on the radial rate with bisection safeguard.
    let mut tau = h * r_lo / (r_lo - r_hi);
    for _ in 0..100 {
        let (r, y) = residual(tau);
        if r.abs() <= tol {
            return Ok((tau, y));
        }
        if r < 0.0 {
            lo = tau;
        } else {
            hi = tau;
        }
        let rate = radial_rate(&y);
        let newton = tau - r / rate;
        tau = if rate > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * h {
            let (_, y) = residual(hi);
            return Ok((hi, y));
        }
    }
    let (_, y) = residual(tau);
    Ok((tau, y))
}
