use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

use lls_core::config::{self, Strategy};
use lls_core::harness::{alpha_grid, leg_sweep, metrics, run_scenario};

// Entry heading of a straight periodic gait with a right first stance:
// the chord offset pi/2 - alpha - phi/2 cancels it for alpha near 0.83.
fn line_scenario(y0: f64, extra: &str) -> String {
    format!(
        r#"
[curve]
kind = "line"
point = [0.0, 0.0]
direction = [1.0, 0.0]

[leg]
mass = 0.0025
inertia = 4e-7
rest_length = 0.017
alpha_min = {FRAC_PI_6}
alpha_max = {FRAC_PI_3}

[initial]
position = [0.0, {y0}]
speed = 0.2
heading = -0.3
side = "right"

[tracking]
gain = 0.5
rho_c = 0.03

[run]
q_target = 0.0144
max_stances = 20
stop_on_convergence = false
{extra}
"#
    )
}

fn scenario(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/");
    std::fs::read_to_string(format!("{path}{name}.toml")).unwrap()
}

#[test]
fn runs_are_deterministic() {
    let cfg = config::parse(&scenario("circle_tracking"), &[]).unwrap();
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    assert_eq!(
        serde_json::to_string(&a.records).unwrap(),
        serde_json::to_string(&b.records).unwrap()
    );
}

#[test]
fn set_point_is_a_fixed_point() {
    let cfg = config::parse(&line_scenario(0.03, ""), &[]).unwrap();
    let trace = run_scenario(&cfg).unwrap();
    for r in &trace.records {
        assert!(r.error.abs() < 1e-9, "stance {}: {}", r.stance, r.error);
    }
}

#[test]
fn inverse_strategy_decays_at_one_minus_k() {
    let text = line_scenario(0.032, "strategy = \"inverse\"");
    let cfg = config::parse(&text, &["tracking.adaptive=false".into()]).unwrap();
    assert_eq!(cfg.run.strategy, Strategy::Inverse);
    let trace = run_scenario(&cfg).unwrap();
    let e0 = trace.records[0].error;
    for r in &trace.records {
        assert!(r.exact && !r.approx);
        let expect = 0.5f64.powi(r.stance as i32 + 1) * e0;
        assert!(
            (r.error_next - expect).abs() < 1e-9 * e0.abs(),
            "stance {}",
            r.stance
        );
    }
}

#[test]
fn gain_override_changes_the_rate() {
    let text = line_scenario(0.032, "strategy = \"inverse\"");
    let cfg = config::parse(
        &text,
        &[
            "tracking.gain=0.9".into(),
            "tracking.adaptive=false".into(),
            "run.max_stances=1".into(),
        ],
    )
    .unwrap();
    assert_eq!(cfg.tracking.gain, 0.9);
    let trace = run_scenario(&cfg).unwrap();
    let r = &trace.records[0];
    assert!((r.error_next - 0.1 * r.error).abs() < 1e-9 * r.error.abs());
}

#[test]
fn circle_scenario_converges_within_the_bound() {
    let cfg = config::parse(&scenario("circle_tracking"), &[]).unwrap();
    let trace = run_scenario(&cfg).unwrap();
    let m = metrics(&trace, &cfg);
    assert_eq!(m.stances, 40);
    assert!(m.stances_to_converge.is_some());
    assert!(m.bound_check);
    assert!(m.max_energy_drift < 1e-9 && m.max_momentum_drift < 1e-10);
    assert!(m.max_theta_residual < 1e-8);
}

#[test]
fn ellipse_and_constrained_scenarios_run() {
    for name in ["ellipse", "constrained_circle", "straight_line"] {
        let cfg = config::parse(&scenario(name), &[]).unwrap();
        let trace = run_scenario(&cfg).unwrap();
        let m = metrics(&trace, &cfg);
        assert!(
            m.bound_check,
            "{name}: tail {} bound {}",
            m.tail_error, m.bound
        );
    }
}

#[test]
fn sweep_covers_the_grid_with_endpoints() {
    let cfg = config::parse(&scenario("circle_tracking"), &[]).unwrap();
    let sweep = cfg.sweep.unwrap();
    let grid = alpha_grid(&sweep).unwrap();
    let rows = leg_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), sweep.points);
    assert_eq!(grid.len(), sweep.points);
    assert_eq!(rows[0].alpha, sweep.alpha_min);
    assert_eq!(rows.last().unwrap().alpha, sweep.alpha_max);
    for (r, a) in rows.iter().zip(&grid) {
        assert_eq!(r.alpha, *a);
    }
}

#[test]
fn unknown_keys_and_bad_values_are_rejected() {
    let bad_key = line_scenario(0.03, "speed_limit = 3");
    assert!(matches!(
        config::parse(&bad_key, &[]),
        Err(lls_core::Error::Config(_))
    ));
    let bad_gain = config::parse(&line_scenario(0.03, ""), &["tracking.gain=2.5".into()]);
    assert!(matches!(bad_gain, Err(lls_core::Error::Config(_))));
}
