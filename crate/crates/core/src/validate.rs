//! Oracle and property suites behind `lls validate`.
//!
//! Every suite draws its samples from a seeded generator, so a report is
//! reproducible from `(suite, seed)`.

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::Serialize;

use crate::body::{
    control_cost, integrate_body, posture_targets, torque, torque_coeffs, BodyState, PostureGains,
};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, CenterDistance, Point};
use crate::quadrature::{self, Tolerance};
use crate::stance::{
    heading_increment, heading_update, integrate_stance, ComState, IntegratorSettings, LegParams,
    Side, StancePlan,
};
use crate::tracking::{feasible_f_intervals, solve_theta, step_distance_update};

pub const SUITES: [&str; 7] = [
    "conservation",
    "lemma1",
    "theorem1",
    "quadrature",
    "reflection",
    "posture",
    "optimality",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, samples: usize, worst: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            samples,
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run one suite by name, or every suite for `"all"`.
pub fn run(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s, seed)).collect();
    }
    Ok(vec![run_one(name, seed)?])
}

fn run_one(name: &str, seed: u64) -> Result<SuiteReport> {
    let mut rng = StdRng::seed_from_u64(seed);
    let checks = match name {
        "conservation" => conservation(&mut rng)?,
        "lemma1" => lemma1(&mut rng),
        "theorem1" => theorem1(&mut rng)?,
        "quadrature" => quadrature_vs_ode(&mut rng)?,
        "reflection" => reflection(&mut rng)?,
        "posture" => posture(&mut rng),
        "optimality" => optimality(&mut rng)?,
        other => {
            return Err(Error::Usage(format!(
                "unknown suite `{other}`; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteReport {
        suite: name.into(),
        checks,
    })
}

/// A random stance with parameters in the cockroach range.
pub struct RandomStance {
    pub state: ComState,
    pub plan: StancePlan,
    pub params: LegParams,
}

pub fn random_stance(rng: &mut StdRng) -> Result<RandomStance> {
    let mass = 0.0025;
    let eta = rng.random_range(0.015..0.019);
    let v = rng.random_range(0.15..0.25);
    let alpha = rng.random_range(0.3..1.3);
    let b = rng.random_range(0.5..2.0);
    let side = if rng.random_bool(0.5) {
        Side::Right
    } else {
        Side::Left
    };
    let params = LegParams {
        mass,
        inertia: 4e-7,
        rest_length: eta,
        alpha_min: 0.1,
        alpha_max: 1.4,
    };
    let state = ComState {
        r: Point::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        v,
        heading: rng.random_range(-3.0..3.0),
        side_next: side,
    };
    let plan = StancePlan::new(side, alpha, b, eta, v, mass)?;
    Ok(RandomStance {
        state,
        plan,
        params,
    })
}

fn conservation(rng: &mut StdRng) -> Result<Vec<Check>> {
    let n = 100;
    let (mut e, mut p, mut v) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let s = random_stance(rng)?;
        let out = integrate_stance(&s.state, &s.plan, &s.params, &IntegratorSettings::default())?;
        e = e.max(out.energy_drift);
        p = p.max(out.momentum_drift);
        v = v.max(((out.next.v - s.state.v) / s.state.v).abs());
    }
    Ok(vec![
        Check::at_most("relative energy drift", n, e, 1e-9),
        Check::at_most("relative angular momentum drift", n, p, 1e-10),
        Check::at_most("relative exit speed change", n, v, 1e-10),
    ])
}

fn lemma1(rng: &mut StdRng) -> Vec<Check> {
    let n = 10_000;
    let mut disagreements = 0usize;
    for j in 0..n {
        let q = rng.random_range(0.001..0.03);
        let lambda = if j % 10 == 0 {
            CenterDistance::Infinite
        } else {
            let l = rng.random_range(0.005..0.5);
            CenterDistance::Finite(if j % 10 == 1 { -l } else { l })
        };
        let span = lambda.finite().map_or(q, |l| 2.0 * l.abs() + q);
        let f = rng.random_range(-1.2 * span..1.2 * span);
        if solve_theta(f, q, lambda).is_ok() != feasible_f_intervals(q, lambda).contains(f) {
            disagreements += 1;
        }
    }
    vec![Check::at_most(
        "solvability vs interval membership disagreements",
        n,
        disagreements as f64,
        0.0,
    )]
}

fn theorem1(rng: &mut StdRng) -> Result<Vec<Check>> {
    let n = 20;
    let steps = 30;
    let mut worst = 0.0f64;
    for _ in 0..n {
        let k: f64 = rng.random_range(0.05..1.95);
        let q: f64 = rng.random_range(0.005..0.02);
        let radius = rng.random_range(0.02..0.5);
        let rho_c = rng.random_range(0.01..0.1);
        let lambda_c = rho_c + radius;
        let room = q.min(2.0 * lambda_c - q);
        let e0 = rng.random_range(-0.9..0.9) * room / k.max(1.0);
        let mut rho = rho_c + e0;
        for i in 1..=steps {
            let f = -k * (rho - rho_c);
            let theta = solve_theta(f, q, CenterDistance::Finite(rho + radius))?;
            rho = step_distance_update(rho, theta, q, 1.0 / radius);
            let expect = (1.0 - k).powi(i) * e0;
            worst = worst.max(((rho - rho_c) - expect).abs() / e0.abs());
        }
    }
    Ok(vec![Check::at_most(
        "|e_i - (1 - K)^i e_0| / |e_0| over 30 stances",
        n,
        worst,
        1e-10,
    )])
}

fn quadrature_vs_ode(rng: &mut StdRng) -> Result<Vec<Check>> {
    let n = 50;
    let (mut phi, mut t) = (0.0f64, 0.0f64);
    for _ in 0..n {
        let s = random_stance(rng)?;
        let out = integrate_stance(&s.state, &s.plan, &s.params, &IntegratorSettings::default())?;
        phi = phi.max((out.sweep - s.plan.sweep).abs());
        t = t.max((out.duration - s.plan.duration).abs());
    }
    Ok(vec![
        Check::at_most("sweep angle difference (rad)", n, phi, 1e-6),
        Check::at_most("stance duration difference (s)", n, t, 1e-8),
    ])
}

fn reflection(rng: &mut StdRng) -> Result<Vec<Check>> {
    let n = 50;
    let (mut mirror, mut update, mut chord) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..n {
        let s = random_stance(rng)?;
        let out = integrate_stance(&s.state, &s.plan, &s.params, &IntegratorSettings::default())?;
        let delta = out.chord_heading();
        let mirrored = normalize_angle(2.0 * delta - s.state.heading);
        mirror = mirror.max(normalize_angle(out.next.heading - mirrored).abs());
        let predicted = heading_update(s.state.heading, s.plan.alpha, s.plan.sweep, s.plan.side);
        update = update.max(normalize_angle(out.next.heading - predicted).abs());
        chord = chord.max((out.q_vec.norm() - s.plan.chord).abs());
    }
    Ok(vec![
        Check::at_most("exit velocity mirror about chord (rad)", n, mirror, 1e-9),
        Check::at_most("exit heading vs heading update (rad)", n, update, 1e-9),
        Check::at_most("|q_vec| vs chord length (m)", n, chord, 1e-10),
    ])
}

fn random_gains(rng: &mut StdRng) -> PostureGains {
    PostureGains {
        c1: rng.random_range(-0.3..0.3),
        c2: rng.random_range(-5e-6..5e-6),
        k4: rng.random_range(0.05..1.0),
        k5: rng.random_range(0.05..1.0),
    }
}

fn random_body(rng: &mut StdRng) -> BodyState {
    BodyState {
        sigma: rng.random_range(-3.0..3.0),
        p_sigma: rng.random_range(-1e-5..1e-5),
    }
}

fn posture(rng: &mut StdRng) -> Vec<Check> {
    let inertia = 4e-7;
    let n = 100;
    let (mut land_sigma, mut land_p) = (0.0f64, 0.0f64);
    let (mut rate_rel, mut rate_p) = (0.0f64, 0.0f64);
    let mut deadbeat = 0.0f64;
    for _ in 0..n {
        let g = random_gains(rng);
        let mut body = random_body(rng);
        let mut heading = rng.random_range(-3.0..3.0);
        let mut side = Side::Right;
        let rel0 = body.sigma - heading - g.c1;
        let p0 = body.p_sigma - g.c2;
        for k in 1..=20 {
            let alpha = rng.random_range(0.5..1.0);
            let sweep = rng.random_range(0.6..1.0);
            let t = rng.random_range(0.04..0.1);
            let target = posture_targets(&body, heading, &g, alpha, sweep, side);
            let (a1, a2) = torque_coeffs(&body, &target, t, inertia);
            let end = integrate_body(&body, a1, a2, t, inertia);
            land_sigma = land_sigma.max((end.sigma - target.sigma).abs());
            land_p = land_p.max((end.p_sigma - target.p_sigma).abs() / 1e-5);
            body = end;
            heading += heading_increment(alpha, sweep, side);
            side = side.other();
            // After k stances the limit alternates: -C after a right stance.
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            let rel_err = body.sigma - heading - s * g.c1;
            let p_err = body.p_sigma - s * g.c2;
            rate_rel = rate_rel.max((rel_err - (1.0 - g.k4).powi(k) * rel0).abs());
            rate_p = rate_p.max((p_err - (1.0 - g.k5).powi(k) * p0).abs() / 1e-5);
        }
        let one = PostureGains {
            k4: 1.0,
            k5: 1.0,
            ..g
        };
        let b = random_body(rng);
        let h = rng.random_range(-3.0..3.0);
        let t = posture_targets(&b, h, &one, 0.7, 0.9, Side::Right);
        let h1 = h + heading_increment(0.7, 0.9, Side::Right);
        deadbeat = deadbeat
            .max((t.sigma - h1 + g.c1).abs())
            .max((t.p_sigma + g.c2).abs() / 1e-5);
    }
    vec![
        Check::at_most("landing error in sigma (rad)", n, land_sigma, 1e-12),
        Check::at_most(
            "landing error in p_sigma (relative to 1e-5)",
            n,
            land_p,
            1e-12,
        ),
        Check::at_most("relative-angle decay vs (1 - K4)^k", n, rate_rel, 1e-10),
        Check::at_most(
            "momentum decay vs (1 - K5)^k (relative to 1e-5)",
            n,
            rate_p,
            1e-10,
        ),
        Check::at_most(
            "deadbeat gains reach the alternating target",
            n,
            deadbeat,
            1e-12,
        ),
    ]
}

/// Shifted Legendre polynomial of degree `n` on `[0, T]`; degrees >= 2 are
/// orthogonal to `1` and `t`, so they leave both endpoints unchanged.
pub fn shifted_legendre(n: usize, t: f64, duration: f64) -> f64 {
    let x = 2.0 * t / duration - 1.0;
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn optimality(rng: &mut StdRng) -> Result<Vec<Check>> {
    let inertia = 4e-7;
    let n = 100;
    let per = 20;
    let tol = Tolerance {
        abs: 1e-30,
        rel: 1e-13,
        required: 1e-6,
        max_intervals: 200,
    };
    let mut worst_margin = f64::INFINITY;
    let mut worst_endpoint = 0.0f64;
    let mut worst_closed_form = 0.0f64;
    for _ in 0..n {
        let body = random_body(rng);
        let target = random_body(rng);
        let t = rng.random_range(0.04..0.1);
        let (a1, a2) = torque_coeffs(&body, &target, t, inertia);
        let tau = |s: f64| torque(s, a1, a2, inertia, t).unwrap_or(0.0);
        let j_star = control_cost(a1, a2, t, inertia);
        let numeric = quadrature::integrate(|s| tau(s).powi(2), 0.0, t, tol)?.value;
        worst_closed_form = worst_closed_form.max((numeric - j_star).abs() / j_star.max(1e-300));
        let scale = (j_star / t).sqrt().max(1e-12);
        for _ in 0..per {
            let coeffs: Vec<f64> = (0..4)
                .map(|_| rng.random_range(-1.0..1.0) * scale)
                .collect();
            let dtau = |s: f64| {
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * shifted_legendre(j + 2, s, t))
                    .sum::<f64>()
            };
            let j = quadrature::integrate(|s| (tau(s) + dtau(s)).powi(2), 0.0, t, tol)?.value;
            worst_margin = worst_margin.min((j - j_star) / j_star.max(1e-300));
            // Endpoint shifts: int dtau and int (T - s) dtau / I.
            let dp = quadrature::integrate(dtau, 0.0, t, tol)?.value;
            let ds = quadrature::integrate(|s| (t - s) * dtau(s), 0.0, t, tol)?.value / inertia;
            worst_endpoint = worst_endpoint.max(dp.abs() / 1e-5).max(ds.abs());
        }
    }
    Ok(vec![
        Check::at_most(
            "closed-form cost vs numeric integral (relative)",
            n,
            worst_closed_form,
            1e-10,
        ),
        Check {
            name: "smallest relative cost increase of perturbed profiles".into(),
            samples: n * per,
            worst: worst_margin,
            tolerance: 0.0,
            passed: worst_margin > 0.0,
        },
        Check::at_most(
            "endpoint shift of perturbations",
            n * per,
            worst_endpoint,
            1e-10,
        ),
    ])
}
