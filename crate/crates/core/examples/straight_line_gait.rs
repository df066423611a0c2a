//! Wall following: the runner starts 6 cm from a straight wall and settles at
//! 3 cm while its body angle alternates about the heading.

use lls_core::config;
use lls_core::harness::{metrics, run_scenario};

fn main() -> lls_core::Result<()> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/straight_line.toml"
    );
    let cfg = config::load(path.as_ref(), &[])?;
    let trace = run_scenario(&cfg)?;
    println!("stance  side   x_cm    y_cm    heading  sigma-heading  alpha");
    for r in &trace.records {
        println!(
            "{:6}  {:5}  {:6.2}  {:6.3}  {:+.4}  {:+.4}        {:.4}",
            r.stance,
            format!("{:?}", r.side),
            r.x * 100.0,
            r.y * 100.0,
            r.heading,
            r.sigma - r.heading,
            r.alpha
        );
    }
    let m = metrics(&trace, &cfg);
    println!(
        "converged after {:?} stances, final error {:.2e} m",
        m.stances_to_converge, m.final_error
    );
    Ok(())
}
