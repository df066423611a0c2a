//! The hybrid loop. At every touchdown: find the closest point, pick the
//! distance change `f = -K (rho - rho_c)`, turn the steering angle that
//! realizes it into a leg plan, run the stance and the body channel, record.

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::body::{control_cost, integrate_body, posture_targets, torque_coeffs, BodyState};
use crate::config::{CurveSpec, DistanceModel, ScenarioConfig, Strategy, SweepSection};
use crate::error::{Error, Result};
use crate::geometry::{advance_zeta, closest_frame, normalize_angle, unit, ClosestFrame, Point};
use crate::leg_solver::{
    b_for_q, neighborhood_bound, q_of_alpha, ApproxGains, ApproxRequest, SteeringContext,
};
use crate::stance::{
    chord_offset, heading_update, integrate_stance, theta_difference_check, ComState, Side,
    StancePair, StancePlan,
};
use crate::tracking::{
    select_gain, simplified_steering_sine, simplified_update_sine, steering_sine, SINE_SLACK,
};

/// Relative speed change across a stance beyond which the run is aborted.
pub const SPEED_TOLERANCE: f64 = 1e-9;

/// One stance. Lengths in m, angles in rad, times in s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub stance: usize,
    pub side: Side,
    #[serde(rename = "time_s")]
    pub time: f64,
    #[serde(rename = "x_m")]
    pub x: f64,
    #[serde(rename = "y_m")]
    pub y: f64,
    #[serde(rename = "rho_m")]
    pub rho: f64,
    #[serde(rename = "error_m")]
    pub error: f64,
    /// Error after the stance.
    #[serde(rename = "error_next_m")]
    pub error_next: f64,
    #[serde(rename = "lambda_m")]
    pub lambda: f64,
    #[serde(rename = "zeta_rad")]
    pub zeta: f64,
    #[serde(rename = "heading_rad")]
    pub heading: f64,
    #[serde(rename = "speed_m_per_s")]
    pub speed: f64,
    pub gain: f64,
    #[serde(rename = "f_m")]
    pub f: f64,
    pub sin_theta_desired: f64,
    #[serde(rename = "theta_desired_rad")]
    pub theta_desired: f64,
    #[serde(rename = "theta_rad")]
    pub theta: f64,
    #[serde(rename = "alpha_rad")]
    pub alpha: f64,
    #[serde(rename = "b_n_per_m")]
    pub b: f64,
    #[serde(rename = "q_m")]
    pub q: f64,
    #[serde(rename = "sweep_rad")]
    pub sweep: f64,
    #[serde(rename = "duration_s")]
    pub duration: f64,
    pub approx: bool,
    pub exact: bool,
    pub k_tilde: f64,
    pub m_tilde: f64,
    pub m_sup: f64,
    #[serde(rename = "rho_tilde_m")]
    pub rho_tilde: f64,
    #[serde(rename = "sigma_rad")]
    pub sigma: f64,
    #[serde(rename = "p_sigma_kg_m2_per_s")]
    pub p_sigma: f64,
    #[serde(rename = "torque_a1")]
    pub a1: f64,
    #[serde(rename = "torque_a2")]
    pub a2: f64,
    #[serde(rename = "torque_cost")]
    pub cost: f64,
    pub energy_drift: f64,
    pub momentum_drift: f64,
    /// Steering-angle difference residual against the previous stance (rad).
    pub theta_residual: f64,
}

/// Sampled stance trajectory, absolute time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub stance: usize,
    #[serde(rename = "time_s")]
    pub time: f64,
    #[serde(rename = "eta_m")]
    pub eta: f64,
    #[serde(rename = "psi_rad")]
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub final_state: ComState,
    pub final_body: BodyState,
    pub final_time: f64,
    pub trajectory: Vec<TrajectoryRow>,
    pub converged_after: Option<usize>,
}

struct StanceResult {
    next: ComState,
    theta: f64,
    sweep: f64,
    duration: f64,
    energy_drift: f64,
    momentum_drift: f64,
    error_next: f64,
    small_step: bool,
}

/// Run a scenario until its stance budget or, if enabled, convergence.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Trace> {
    config.validate()?;
    let curve = config.curve.build()?;
    let params = config.leg;
    let gains = config.tracking;
    let run = &config.run;
    let eta_td = config.eta_td();
    let q = run.q_target;
    let v0 = config.initial.speed;

    let mut state = ComState {
        r: Point::new(config.initial.position[0], config.initial.position[1]),
        v: v0,
        heading: config.initial.heading,
        side_next: config.initial.side,
    };
    let mut body = BodyState {
        sigma: config.body_sigma(),
        p_sigma: config.initial.p_sigma,
    };
    let mut time = 0.0;
    let mut records: Vec<TraceRecord> = Vec::new();
    let mut trajectory = Vec::new();
    let mut converged_after = None;
    let mut m_sup = 0.0f64;
    let mut rho_tilde = None;
    let mut previous: Option<(ClosestFrame, f64, f64, f64, Side)> = None;
    let mut warned_small_step = false;

    for i in 0..run.max_stances {
        let frame = closest_frame(&curve, &state.r)?;
        let error = frame.rho - gains.rho_c;
        let rho_tilde_i = *rho_tilde.get_or_insert(error);
        let k = if gains.adaptive {
            select_gain(error, q, frame.lambda, gains.gain)?
        } else {
            gains.gain
        };
        let f = -k * error;
        let sin_target = match run.model {
            DistanceModel::Exact => steering_sine(f, q, frame.lambda),
            DistanceModel::Simplified => simplified_steering_sine(f, q, frame.lambda),
        };
        let theta_desired = sin_target.clamp(-1.0, 1.0).asin();
        let ctx = SteeringContext::new(frame, &state, &params, q, eta_td)?;
        let reachable = sin_target.abs() <= 1.0 + SINE_SLACK;

        let inverse = if reachable {
            match ctx.inverse_solve(theta_desired) {
                Ok(plan) => Some(plan),
                Err(Error::NoConstrainedSolution { .. }) | Err(Error::Unachievable { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let (plan, approx, exact, approx_gains) = match (inverse, run.strategy) {
            (Some(plan), _) => (
                plan,
                false,
                true,
                ApproxGains {
                    k,
                    k_tilde: 0.0,
                    m_tilde: 0.0,
                    m_sup,
                },
            ),
            (None, Strategy::Inverse) => return Err(Error::PlanFailure(i)),
            (None, Strategy::Approx) => {
                let out = ctx
                    .approx_step(&ApproxRequest {
                        sin_target,
                        error,
                        rho_tilde: rho_tilde_i,
                        k,
                        m_sup,
                    })
                    .map_err(|e| {
                        debug!("approximation failed at stance {i}: {e}");
                        Error::PlanFailure(i)
                    })?;
                (out.plan, true, out.exact, out.gains)
            }
        };
        m_sup = approx_gains.m_sup;

        let result = match run.model {
            DistanceModel::Exact => {
                let out = integrate_stance(&state, &plan, &params, &config.integrator)?;
                if let Some(samples) = &out.trajectory {
                    trajectory.extend(samples.iter().map(|s| TrajectoryRow {
                        stance: i,
                        time: time + s.t,
                        eta: s.eta,
                        psi: s.psi,
                    }));
                }
                let next_frame = closest_frame(&curve, &out.next.r)?;
                StanceResult {
                    theta: out.theta_achieved(&frame),
                    next: out.next,
                    sweep: out.sweep,
                    duration: out.duration,
                    energy_drift: out.energy_drift,
                    momentum_drift: out.momentum_drift,
                    error_next: next_frame.rho - gains.rho_c,
                    small_step: true,
                }
            }
            DistanceModel::Simplified => {
                simplified_stance(&config.curve, &state, &frame, &ctx, &plan, config)?
            }
        };

        if !result.small_step && !warned_small_step {
            warned_small_step = true;
            warn!(
                "stance {i}: chord q = {} is not small against lambda = {:?}; the simplified recursion is outside its regime",
                ctx.q, frame.lambda
            );
        }
        if ((result.next.v - v0) / v0).abs() > SPEED_TOLERANCE {
            return Err(Error::InvariantViolation {
                stance: i,
                what: format!("speed changed from {v0} to {}", result.next.v),
            });
        }
        let theta_residual = match previous {
            None => 0.0,
            Some((prev_frame, prev_theta, prev_alpha, prev_sweep, prev_side)) => {
                if prev_frame.chirality != frame.chirality {
                    return Err(Error::InvariantViolation {
                        stance: i,
                        what: "runner crossed the boundary".into(),
                    });
                }
                let gamma = -frame.chirality.sign() * normalize_angle(frame.zeta - prev_frame.zeta);
                theta_difference_check(&StancePair {
                    first: prev_side,
                    chirality: frame.chirality,
                    theta: [prev_theta, result.theta],
                    alpha: [prev_alpha, plan.alpha],
                    sweep: [prev_sweep, result.sweep],
                    gamma,
                })
            }
        };
        if theta_residual.abs() > run.invariant_tolerance {
            return Err(Error::InvariantViolation {
                stance: i,
                what: format!("steering-angle difference residual {theta_residual:e} rad"),
            });
        }

        let target = posture_targets(
            &body,
            state.heading,
            &config.posture,
            plan.alpha,
            result.sweep,
            plan.side,
        );
        let (a1, a2) = torque_coeffs(&body, &target, result.duration, params.inertia);
        let cost = control_cost(a1, a2, result.duration, params.inertia);

        records.push(TraceRecord {
            stance: i,
            side: plan.side,
            time,
            x: state.r.x,
            y: state.r.y,
            rho: frame.rho,
            error,
            error_next: result.error_next,
            lambda: frame.lambda.finite().unwrap_or(f64::INFINITY),
            zeta: frame.zeta,
            heading: state.heading,
            speed: state.v,
            gain: k,
            f,
            sin_theta_desired: sin_target,
            theta_desired,
            theta: result.theta,
            alpha: plan.alpha,
            b: plan.b,
            q: plan.chord,
            sweep: result.sweep,
            duration: result.duration,
            approx,
            exact,
            k_tilde: approx_gains.k_tilde,
            m_tilde: approx_gains.m_tilde,
            m_sup,
            rho_tilde: rho_tilde_i,
            sigma: body.sigma,
            p_sigma: body.p_sigma,
            a1,
            a2,
            cost,
            energy_drift: result.energy_drift,
            momentum_drift: result.momentum_drift,
            theta_residual,
        });

        body = integrate_body(&body, a1, a2, result.duration, params.inertia);
        time += result.duration;
        previous = Some((frame, result.theta, plan.alpha, result.sweep, plan.side));
        rho_tilde = Some(error + f);
        state = result.next;

        if converged_after.is_none() {
            if let Some(n) = convergence_point(
                &records,
                run.convergence_window,
                q,
                gains.gain,
                run.convergence_floor,
            ) {
                converged_after = Some(n);
                info!("converged after {n} stances");
                if run.stop_on_convergence {
                    break;
                }
            }
        }
    }

    Ok(Trace {
        records,
        final_state: state,
        final_body: body,
        final_time: time,
        trajectory,
        converged_after,
    })
}

/// Number of stances after which the last `window` post-stance errors all
/// sit inside `max(M q / (1 - |1 - K|), floor)`, with `M` taken over the window.
fn convergence_point(
    records: &[TraceRecord],
    window: usize,
    q: f64,
    k: f64,
    floor: f64,
) -> Option<usize> {
    if records.len() < window {
        return None;
    }
    let tail = &records[records.len() - window..];
    let m = tail.iter().map(|r| r.m_tilde).fold(0.0, f64::max);
    let band = neighborhood_bound(m, q, k).max(floor);
    tail.iter()
        .all(|r| r.error_next.abs() <= band)
        .then(|| records.len() - window + 1)
}

/// Advance one stance with the small-step distance recursion.
fn simplified_stance(
    spec: &CurveSpec,
    state: &ComState,
    frame: &ClosestFrame,
    ctx: &SteeringContext,
    plan: &StancePlan,
    config: &ScenarioConfig,
) -> Result<StanceResult> {
    let q = ctx.q;
    let theta = ctx.theta_of_alpha(plan.alpha);
    let rho_c = config.tracking.rho_c;
    let step = simplified_update_sine(
        frame.rho,
        theta.sin(),
        q,
        frame.lambda,
        rho_c,
        config.run.simplified_ratio,
    );
    let rho_next = rho_c + step.error_next;
    let gamma = advance_zeta(frame, q, theta, rho_next - frame.rho)?;
    let normal = frame.normal();
    let (r_c, n) = match spec {
        CurveSpec::Circle { center, .. } => {
            let center = Point::new(center[0], center[1]);
            // zeta, and with it the closest point, turns by -chi * gamma.
            let turn = -frame.chirality.sign() * gamma;
            let rot = |v: Point| {
                let (s, c) = turn.sin_cos();
                Point::new(c * v.x - s * v.y, s * v.x + c * v.y)
            };
            (center + rot(frame.r_c - center), rot(normal))
        }
        CurveSpec::Line { .. } => (frame.r_c + frame.tangent() * (q * theta.cos()), normal),
        CurveSpec::Ellipse { .. } => {
            return Err(Error::Config(
                "the simplified model supports circle and line curves only".into(),
            ))
        }
    };
    let sweep = ctx.sweep();
    Ok(StanceResult {
        next: ComState {
            r: r_c + n * rho_next,
            v: state.v,
            heading: heading_update(state.heading, plan.alpha, sweep, plan.side),
            side_next: plan.side.other(),
        },
        theta,
        sweep,
        duration: plan.duration,
        energy_drift: 0.0,
        momentum_drift: 0.0,
        error_next: step.error_next,
        small_step: step.assumption_ok,
    })
}

/// Summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub stances: usize,
    pub stances_to_converge: Option<usize>,
    #[serde(rename = "simulated_time_s")]
    pub simulated_time: f64,
    #[serde(rename = "final_error_m")]
    pub final_error: f64,
    pub max_energy_drift: f64,
    pub max_momentum_drift: f64,
    pub max_theta_residual: f64,
    pub approx_stances: usize,
    pub m_sup: f64,
    #[serde(rename = "neighborhood_bound_m")]
    pub bound: f64,
    /// Largest error over the last 50 stances, or the last half of a shorter run.
    #[serde(rename = "tail_error_m")]
    pub tail_error: f64,
    pub bound_check: bool,
}

pub const TAIL_STANCES: usize = 50;

fn tail_len(n: usize) -> usize {
    TAIL_STANCES.min(n.div_ceil(2))
}

pub fn metrics(trace: &Trace, config: &ScenarioConfig) -> Metrics {
    let r = &trace.records;
    let fmax = |g: &dyn Fn(&TraceRecord) -> f64| r.iter().map(g).fold(0.0, f64::max);
    let m_sup = fmax(&|x| x.m_tilde);
    let bound = neighborhood_bound(m_sup, config.run.q_target, config.tracking.gain);
    let tail = &r[r.len() - tail_len(r.len())..];
    let tail_error = tail.iter().map(|x| x.error_next.abs()).fold(0.0, f64::max);
    Metrics {
        stances: r.len(),
        stances_to_converge: trace.converged_after,
        simulated_time: trace.final_time,
        final_error: r.last().map(|x| x.error_next).unwrap_or(f64::NAN),
        max_energy_drift: fmax(&|x| x.energy_drift),
        max_momentum_drift: fmax(&|x| x.momentum_drift),
        max_theta_residual: fmax(&|x| x.theta_residual.abs()),
        approx_stances: r.iter().filter(|x| x.approx).count(),
        m_sup,
        bound,
        tail_error,
        bound_check: tail_error <= bound.max(config.run.convergence_floor),
    }
}

/// Rows of the leg-angle sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "alpha_rad")]
    pub alpha: f64,
    /// Chord at the fixed stiffness.
    #[serde(rename = "q_m")]
    pub q: f64,
    /// Chord end point in the velocity frame of a right stance.
    #[serde(rename = "qx_m")]
    pub qx: f64,
    #[serde(rename = "qy_m")]
    pub qy: f64,
    /// Stiffness holding the target chord; NaN where unattainable.
    #[serde(rename = "b_n_per_m")]
    pub b: f64,
    /// Whether alpha lies within the leg's admissible range.
    pub in_range: bool,
}

/// Evenly spaced grid including both end points.
pub fn alpha_grid(sweep: &SweepSection) -> Result<Vec<f64>> {
    match sweep.points {
        0 => Err(Error::Config("sweep grid is empty".into())),
        1 => Ok(vec![sweep.alpha_min]),
        n => Ok((0..n)
            .map(|j| {
                if j == n - 1 {
                    sweep.alpha_max
                } else {
                    sweep.alpha_min
                        + (sweep.alpha_max - sweep.alpha_min) * j as f64 / (n - 1) as f64
                }
            })
            .collect()),
    }
}

/// `q(alpha)` at fixed stiffness and `b(alpha)` at fixed chord, in grid order.
pub fn leg_sweep(config: &ScenarioConfig) -> Result<Vec<SweepRow>> {
    let sweep = config
        .sweep
        .ok_or_else(|| Error::Config("scenario has no [sweep] table".into()))?;
    let grid = alpha_grid(&sweep)?;
    let (m, v, eta) = (config.leg.mass, config.initial.speed, config.eta_td());
    let leg = config.leg;
    grid.par_iter()
        .map(|&alpha| {
            let q = q_of_alpha(alpha, eta, sweep.stiffness, v, m)?;
            let phi = 2.0 * (q / (2.0 * eta)).clamp(-1.0, 1.0).asin();
            let dir = unit(chord_offset(alpha, phi, Side::Right));
            let b = match b_for_q(alpha, sweep.q_target, eta, v, m) {
                Ok(b) => b,
                Err(Error::Unachievable { .. }) => f64::NAN,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                alpha,
                q,
                qx: q * dir.x,
                qy: q * dir.y,
                b,
                in_range: alpha >= leg.alpha_min && alpha <= leg.alpha_max,
            })
        })
        .collect()
}
