//! Chord length against leg angle at fixed stiffness, and the stiffness that
//! holds the chord fixed, for a cockroach-sized runner.

use std::f64::consts::{FRAC_PI_2, PI};

use lls_core::leg_solver::{b_for_q, q_of_alpha};

fn main() -> lls_core::error::Result<()> {
    let (m, v, eta, b) = (0.0025, 0.2, 0.017, 1.05);

    let mut best = (0.0, 0.0);
    let mut low = f64::INFINITY;
    println!("alpha_rad  q_cm");
    for j in 1..90 {
        let alpha = FRAC_PI_2 * j as f64 / 90.0;
        let q = q_of_alpha(alpha, eta, b, v, m)?;
        if q > best.1 {
            best = (alpha, q);
        }
        if (PI / 6.0..=PI / 3.0).contains(&alpha) {
            low = low.min(q);
        }
        if j % 6 == 0 {
            println!("{alpha:9.4}  {:.4}", q * 100.0);
        }
    }
    println!("max q {:.4} cm at alpha {:.3}", best.1 * 100.0, best.0);
    println!("min q on [pi/6, pi/3] {:.4} cm", low * 100.0);

    println!("\nalpha_rad  b_N_per_m  (q held at 1.44 cm)");
    for j in 0..=6 {
        let alpha = PI / 6.0 + (PI / 6.0) * j as f64 / 6.0;
        println!("{alpha:9.4}  {:.4}", b_for_q(alpha, 0.0144, eta, v, m)?);
    }
    Ok(())
}
