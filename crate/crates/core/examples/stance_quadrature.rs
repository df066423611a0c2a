//! Sweep angle and stance duration from the quadratures, checked against a
//! direct integration of the same stance.

use std::time::Instant;

use lls_core::geometry::Point;
use lls_core::stance::{
    integrate_stance, stance_profile, ComState, IntegratorSettings, LegParams, Side, StancePlan,
    Touchdown,
};

fn main() -> lls_core::Result<()> {
    let params = LegParams {
        mass: 0.0025,
        inertia: 4e-7,
        rest_length: 0.017,
        alpha_min: 0.3,
        alpha_max: 1.3,
    };
    println!("alpha   phi_quad      phi_ode       T_quad        T_ode         eta_min");
    for &alpha in &[0.3, 0.5, std::f64::consts::FRAC_PI_4, 1.0, 1.2] {
        let td = Touchdown {
            alpha,
            eta_td: 0.017,
            stiffness: 1.05,
            speed: 0.2,
            mass: params.mass,
        };
        let t0 = Instant::now();
        let prof = stance_profile(&td)?;
        let quad_time = t0.elapsed();
        let plan = StancePlan::new(Side::Right, alpha, 1.05, 0.017, 0.2, params.mass)?;
        let state = ComState {
            r: Point::zeros(),
            v: 0.2,
            heading: 0.0,
            side_next: Side::Right,
        };
        let t1 = Instant::now();
        let out = integrate_stance(&state, &plan, &params, &IntegratorSettings::default())?;
        let ode_time = t1.elapsed();
        println!(
            "{alpha:.3}  {:.10}  {:.10}  {:.10}  {:.10}  {:.6}   ({quad_time:?} vs {ode_time:?})",
            prof.sweep, out.sweep, prof.duration, out.duration, prof.eta_min
        );
    }
    Ok(())
}
