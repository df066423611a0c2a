//! The distance recursion on its own: a point that moves by chords of fixed
//! length `q`, steered so that the distance error shrinks by `1 - K` per step.

use lls_core::geometry::CenterDistance;
use lls_core::tracking::{feasible_f_intervals, select_gain, solve_theta, step_distance_update};

fn main() -> lls_core::Result<()> {
    let (radius, rho_c, q, k) = (0.05, 0.03, 0.012, 0.6);
    let mut rho = 0.045;

    let lambda = CenterDistance::Finite(rho + radius);
    println!("feasible f at rho = {rho}:");
    for i in &feasible_f_intervals(q, lambda).0 {
        println!("  [{:+.4}, {:+.4}] m", i.lo, i.hi);
    }

    println!("\nstep  rho_m     error_m     ratio   gain   theta_rad");
    let mut prev = rho - rho_c;
    for i in 0..12 {
        let lambda = CenterDistance::Finite(rho + radius);
        let gain = select_gain(rho - rho_c, q, lambda, k)?;
        let theta = solve_theta(-gain * (rho - rho_c), q, lambda)?;
        rho = step_distance_update(rho, theta, q, 1.0 / radius);
        let e = rho - rho_c;
        println!(
            "{i:4}  {rho:.6}  {e:+.3e}  {:+.4}  {gain:.3}  {theta:+.4}",
            e / prev
        );
        prev = e;
    }
    Ok(())
}
