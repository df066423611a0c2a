//! Stance mechanics of the lateral leg spring with coincident COM and COP.
//!
//! During a stance the COM moves in the central field of a linear leg spring
//! with potential `V = b (eta - eta_td)^2`. Angular momentum about the foot is
//! conserved, so the sweep angle and the stance duration follow from two
//! quadratures over the compression half of the stance. The [`ode`]
//! submodule integrates the same motion directly and serves both as the
//! trajectory generator and as an independent check on the quadratures.
//!
//! Note the potential carries no factor one half.

pub mod ode;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Chirality, Point};
use crate::quadrature::{self, Tolerance};

pub use ode::{integrate_stance, IntegratorSettings, StanceOutcome, TrajectorySample};

/// Which leg supports the body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Right,
    Left,
}

impl Side {
    /// `+1` for a right stance, `-1` for a left stance.
    pub fn sign(self) -> f64 {
        match self {
            Side::Right => 1.0,
            Side::Left => -1.0,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

/// Physical constants of the runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegParams {
    /// kg
    pub mass: f64,
    /// kg m^2
    pub inertia: f64,
    /// Rest leg length (m).
    pub rest_length: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl LegParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.mass > 0.0) {
            return bad("mass must be positive");
        }
        if !(self.inertia > 0.0) {
            return bad("inertia must be positive");
        }
        if !(self.rest_length > 0.0) {
            return bad("rest length must be positive");
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max && self.alpha_max < FRAC_PI_2)
        {
            return bad("leg angle bounds must satisfy 0 < alpha_min < alpha_max < pi/2");
        }
        Ok(())
    }
}

/// COM state at a touchdown event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComState {
    pub r: Point,
    /// Speed (m/s).
    pub v: f64,
    /// Lab angle of the velocity.
    pub heading: f64,
    pub side_next: Side,
}

/// Touchdown conditions that fully determine an integrable stance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Touchdown {
    pub alpha: f64,
    pub eta_td: f64,
    /// Spring coefficient `b` (N/m).
    pub stiffness: f64,
    pub speed: f64,
    pub mass: f64,
}

impl Touchdown {
    /// Total energy; the spring is unloaded at touchdown.
    pub fn energy(&self) -> f64 {
        0.5 * self.mass * self.speed * self.speed
    }

    /// `p_psi = m eta_td v sin(alpha)`.
    pub fn angular_momentum(&self) -> f64 {
        self.mass * self.eta_td * self.speed * self.alpha.sin()
    }
}

/// Per-stance control decision and the stance it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancePlan {
    pub side: Side,
    pub alpha: f64,
    pub b: f64,
    pub eta_td: f64,
    pub sweep: f64,
    pub chord: f64,
    pub duration: f64,
}

impl StancePlan {
    /// Evaluate the stance produced by `(alpha, b, eta_td)` at the given speed.
    pub fn new(side: Side, alpha: f64, b: f64, eta_td: f64, speed: f64, mass: f64) -> Result<Self> {
        let td = Touchdown {
            alpha,
            eta_td,
            stiffness: b,
            speed,
            mass,
        };
        let p = stance_profile(&td)?;
        Ok(StancePlan {
            side,
            alpha,
            b,
            eta_td,
            sweep: p.sweep,
            chord: chord_length(eta_td, p.sweep),
            duration: p.duration,
        })
    }
}

/// `V = b (eta - eta_td)^2`.
pub fn potential(eta: f64, b: f64, eta_td: f64) -> f64 {
    b * (eta - eta_td) * (eta - eta_td)
}

/// `g(eta) = 2E - p^2 / (m eta^2) - 2 V(eta)`, i.e. `m * eta_dot^2`.
fn radial_residual(eta: f64, energy: f64, p_psi: f64, b: f64, eta_td: f64, m: f64) -> f64 {
    2.0 * energy - p_psi * p_psi / (m * eta * eta) - 2.0 * potential(eta, b, eta_td)
}

/// Shortest leg length of the stance: the root of `g` below `eta_td`.
///
/// `g` is strictly increasing on `(0, eta_td)`, so the root is unique and
/// bisection runs to full double precision.
pub fn eta_min(energy: f64, p_psi: f64, b: f64, eta_td: f64, m: f64) -> Result<f64> {
    let g = |eta: f64| radial_residual(eta, energy, p_psi, b, eta_td, m);
    let mut hi = eta_td;
    if !(g(hi) > 0.0) {
        return Err(Error::NoCompression);
    }
    let mut lo = eta_td * 1e-9;
    if !(g(lo) < 0.0) {
        return Err(Error::NoCompression);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Sweep angle, duration and turning radius of one stance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StanceProfile {
    pub eta_min: f64,
    pub sweep: f64,
    pub duration: f64,
}

// `g(eta) / (eta - eta_min)`, exact given g(eta_min) = 0.
fn reduced_residual(eta: f64, eta_lo: f64, p_psi: f64, b: f64, eta_td: f64, m: f64) -> f64 {
    p_psi * p_psi / m * (eta + eta_lo) / (eta * eta * eta_lo * eta_lo)
        - 2.0 * b * (eta + eta_lo - 2.0 * eta_td)
}

fn half_integrals(td: &Touchdown) -> Result<(f64, f64, f64)> {
    let energy = td.energy();
    let p = td.angular_momentum();
    let (b, eta_td, m) = (td.stiffness, td.eta_td, td.mass);
    let lo = eta_min(energy, p, b, eta_td, m)?;
    let s_max = (eta_td - lo).sqrt();
    let tol = Tolerance::default();
    // eta = eta_min + s^2 turns the 1/sqrt endpoint singularity into a smooth integrand.
    let sweep = quadrature::integrate(
        |s| {
            let eta = lo + s * s;
            2.0 * p / (eta * eta * (m * reduced_residual(eta, lo, p, b, eta_td, m)).sqrt())
        },
        0.0,
        s_max,
        tol,
    )?;
    let time = quadrature::integrate(
        |s| {
            let eta = lo + s * s;
            2.0 * (m / reduced_residual(eta, lo, p, b, eta_td, m)).sqrt()
        },
        0.0,
        s_max,
        tol,
    )?;
    Ok((lo, sweep.value, time.value))
}

/// Both quadratures at once.
pub fn stance_profile(td: &Touchdown) -> Result<StanceProfile> {
    validate_touchdown(td)?;
    let (lo, half_sweep, half_time) = half_integrals(td)?;
    Ok(StanceProfile {
        eta_min: lo,
        sweep: 2.0 * half_sweep,
        duration: 2.0 * half_time,
    })
}

fn validate_touchdown(td: &Touchdown) -> Result<()> {
    if !(td.eta_td > 0.0 && td.stiffness > 0.0 && td.speed > 0.0 && td.mass > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "touchdown state must have positive length, stiffness, speed and mass: {td:?}"
        )));
    }
    if !(td.alpha > 0.0 && td.alpha < FRAC_PI_2) {
        return Err(Error::NoCompression);
    }
    Ok(())
}

/// Angle swept about the foot during the stance.
pub fn sweep_angle(td: &Touchdown) -> Result<f64> {
    Ok(stance_profile(td)?.sweep)
}

/// Time from touchdown to lift-off.
pub fn stance_duration(td: &Touchdown) -> Result<f64> {
    Ok(stance_profile(td)?.duration)
}

/// `q = 2 eta_td sin(phi / 2)`.
pub fn chord_length(eta_td: f64, sweep: f64) -> f64 {
    2.0 * eta_td * (0.5 * sweep).sin()
}

/// Unwrapped heading change over a stance: `+-(pi - phi - 2 alpha)`.
pub fn heading_increment(alpha: f64, sweep: f64, side: Side) -> f64 {
    side.sign() * (PI - sweep - 2.0 * alpha)
}

/// Velocity heading at lift-off; the exit velocity mirrors the entry velocity about the chord.
pub fn heading_update(heading: f64, alpha: f64, sweep: f64, side: Side) -> f64 {
    normalize_angle(heading + heading_increment(alpha, sweep, side))
}

/// Chord direction relative to the entry velocity: `+-(pi/2 - alpha - phi/2)`.
pub fn chord_offset(alpha: f64, sweep: f64, side: Side) -> f64 {
    side.sign() * (FRAC_PI_2 - alpha - 0.5 * sweep)
}

/// Two consecutive stances as seen from the tracking frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancePair {
    /// Side of the first stance.
    pub first: Side,
    pub chirality: Chirality,
    pub theta: [f64; 2],
    pub alpha: [f64; 2],
    pub sweep: [f64; 2],
    /// Rotation of the closest point between the two touchdowns, positive on a convex curve.
    pub gamma: f64,
}

/// Residual of the steering-angle difference relation between consecutive stances.
///
/// With `chi` the frame chirality and `s` the side sign of the first stance,
/// the relation is
/// `theta_1 - theta_0 + gamma + chi s ((alpha_1 - alpha_0) + (phi_1 - phi_0) / 2) = 0`.
pub fn theta_difference_check(pair: &StancePair) -> f64 {
    let coupling = pair.chirality.sign() * pair.first.sign();
    normalize_angle(
        pair.theta[1] - pair.theta[0]
            + pair.gamma
            + coupling * ((pair.alpha[1] - pair.alpha[0]) + 0.5 * (pair.sweep[1] - pair.sweep[0])),
    )
}
