//! Body posture over a dozen stances: the relative angle and angular momentum
//! settle into the alternating gait while each stance uses the cheapest torque.

use lls_core::body::{
    control_cost, integrate_body, posture_targets, torque, torque_coeffs, BodyState, PostureGains,
};
use lls_core::stance::{heading_increment, Side};

fn main() -> lls_core::Result<()> {
    let inertia = 4e-7;
    let gains = PostureGains {
        c1: 0.1,
        c2: 2e-7,
        k4: 0.5,
        k5: 0.5,
    };
    gains.validate()?;
    let (alpha, sweep, duration) = (0.8, 0.87, 0.075);

    let mut body = BodyState {
        sigma: 0.4,
        p_sigma: -3e-6,
    };
    let mut heading = 0.0;
    let mut side = Side::Right;
    println!("stance  side   sigma-heading  p_sigma      cost");
    for i in 0..12 {
        let target = posture_targets(&body, heading, &gains, alpha, sweep, side);
        let (a1, a2) = torque_coeffs(&body, &target, duration, inertia);
        body = integrate_body(&body, a1, a2, duration, inertia);
        heading += heading_increment(alpha, sweep, side);
        println!(
            "{i:6}  {:5}  {:+.6}      {:+.3e}  {:.3e}",
            format!("{side:?}"),
            body.sigma - heading,
            body.p_sigma,
            control_cost(a1, a2, duration, inertia)
        );
        if i == 0 {
            let mid = torque(0.5 * duration, a1, a2, inertia, duration)?;
            println!("        torque at mid-stance {mid:+.3e} N m");
        }
        side = side.other();
    }
    Ok(())
}
