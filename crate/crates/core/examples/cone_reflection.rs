//! The cone of chord directions reachable at fixed chord length, and how it
//! flips about each chord taken.

use lls_core::geometry::{CenterDistance, Point};
use lls_core::leg_solver::{build_cones, min_turn_radius};
use lls_core::stance::{ComState, LegParams, Side};

fn main() -> lls_core::Result<()> {
    let params = LegParams {
        mass: 0.0025,
        inertia: 4e-7,
        rest_length: 0.017,
        alpha_min: std::f64::consts::FRAC_PI_6,
        alpha_max: std::f64::consts::FRAC_PI_3,
    };
    params.validate()?;
    let q = 0.0144;
    let state = ComState {
        r: Point::zeros(),
        v: 0.2,
        heading: 0.0,
        side_next: Side::Right,
    };
    let cones = build_cones(
        &state,
        &params,
        q,
        params.rest_length,
        CenterDistance::Finite(0.1),
    )?;

    println!(
        "sweep {:.4} rad, gamma {:.4} rad",
        cones.full.sweep,
        cones.full.gamma.unwrap_or(0.0)
    );
    println!(
        "smallest circle the cone can follow: {:.4} m",
        min_turn_radius(q, params.alpha_min, params.alpha_max)
    );

    let mut cone = cones.full;
    println!("\nstep  side   v_ref     edge_lo   edge_hi   chord");
    for i in 0..6 {
        let [lo, hi] = cone.edges();
        let chord = cone.chord_heading(cone.mid_alpha());
        println!(
            "{i:4}  {:5}  {:+.4}  {:+.4}  {:+.4}  {:+.4}",
            format!("{:?}", cone.side),
            cone.v_ref,
            lo,
            hi,
            chord
        );
        cone = cone.reflect(chord);
    }
    for (name, c) in [("C^A", cones.sub_a), ("C^B", cones.sub_b)] {
        let [lo, hi] = c.edges();
        println!(
            "{name}: alpha [{:.4}, {:.4}] chord [{lo:+.4}, {hi:+.4}]",
            c.alpha_range[0], c.alpha_range[1]
        );
    }
    Ok(())
}
