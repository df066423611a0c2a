//! Run the shipped circle scenario and print the distance error per stance.

use lls_core::config;
use lls_core::harness::{metrics, run_scenario};

fn main() -> lls_core::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../scenarios/circle_tracking.toml"
        )
        .into()
    });
    let cfg = config::load(path.as_ref(), &[])?;
    let trace = run_scenario(&cfg)?;
    println!("stance  t_s     error_mm  alpha   b_N/m   approx");
    for r in &trace.records {
        println!(
            "{:5}  {:.4}  {:8.3}  {:.4}  {:.4}  {}",
            r.stance,
            r.time,
            r.error * 1e3,
            r.alpha,
            r.b,
            r.approx
        );
    }
    let m = metrics(&trace, &cfg);
    println!(
        "{}",
        serde_json::to_string_pretty(&m).expect("metrics serialize")
    );
    Ok(())
}
