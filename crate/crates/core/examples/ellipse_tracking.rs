//! Follow a rotated ellipse clockwise and write the result files.
//!
//! `cargo run --example ellipse_tracking -- out/ellipse`

use std::path::PathBuf;

use lls_core::harness::{metrics, run_scenario};
use lls_core::{config, output};

fn main() -> lls_core::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("lls-ellipse"));
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/ellipse.toml");
    let cfg = config::load(path.as_ref(), &[])?;
    let trace = run_scenario(&cfg)?;
    let m = metrics(&trace, &cfg);
    let files = output::write_simulation(&dir, &trace, &m)?;

    for r in trace.records.iter().step_by(8) {
        println!(
            "stance {:3}  radius of curvature {:.3} m  error {:+.3e} m",
            r.stance,
            r.lambda - r.rho,
            r.error
        );
    }
    println!(
        "tail error {:.3e} m, {} trajectory samples",
        m.tail_error,
        trace.trajectory.len()
    );
    println!("wrote {}", files.trace.display());
    if let Some(t) = files.trajectory {
        println!("wrote {}", t.display());
    }
    Ok(())
}
