//! Constrained tracking: with a leg-angle range too narrow for the steady
//! gait, the approximation method keeps the error within M q / (1 - |1 - K|).

use lls_core::config;
use lls_core::harness::{metrics, run_scenario};
use lls_core::leg_solver::{min_turn_radius, neighborhood_bound};

fn main() -> lls_core::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/constrained_circle.toml"
    );
    let text = std::fs::read_to_string(path)?;
    println!("radius  range  r_min_m  tail_err_mm  bound_mm  tail_window_bound_mm  approx");
    for (radius, width) in [(0.1, 0.1), (0.2, 0.06), (0.3, 0.2), (1.0, 0.02)] {
        let cfg = config::parse(
            &text,
            &[
                format!("curve.radius={radius}"),
                format!("leg.alpha_max={}", 0.75 + width),
                format!("initial.position=[{}, 0.0]", radius + 0.1),
            ],
        )?;
        let trace = run_scenario(&cfg)?;
        let m = metrics(&trace, &cfg);
        let tail = &trace.records[trace.records.len() - 50..];
        let m_tail = tail.iter().map(|r| r.m_tilde).fold(0.0, f64::max);
        println!(
            "{radius:5.2}  {width:5.2}  {:7.4}  {:10.4}  {:8.4}  {:19.4}  {}",
            min_turn_radius(cfg.run.q_target, cfg.leg.alpha_min, cfg.leg.alpha_max),
            m.tail_error * 1e3,
            m.bound * 1e3,
            neighborhood_bound(m_tail, cfg.run.q_target, cfg.tracking.gain) * 1e3,
            m.approx_stances
        );
    }
    Ok(())
}
