//! A two-parameter rotation-number scan written to CSV and JSON.

use funnel_lab::experiments::{run_scan, spec_echo, write_outputs, Axis, Config, ScanSpec, ScanTarget};
use std::f64::consts::TAU;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ScanSpec {
        target: ScanTarget::CircleMap,
        analysis: "rotation_number".into(),
        axes: vec![Axis::linear("a", 0.0, 0.9, 10), Axis::linear("omega_tilde", 0.0, TAU, 64)],
        seed: 0,
    };
    let base = Config::default();
    let result = run_scan(&spec, &base, 0)?;
    // mode locking: rotation number flat across at least three neighbouring omega_tilde values
    let plateau = spec.scalar_names().iter().position(|n| *n == "plateau").unwrap_or(0);
    for row in result.records.chunks(64) {
        let locked = row.iter().filter(|r| r.scalars[plateau] == 1.0).count();
        println!("a = {:.2}: {locked}/64 locked", row[0].point.params[0]);
    }
    let dir = std::env::temp_dir().join("funnel-lab-scan-example");
    let paths = write_outputs(&dir, "scan", &spec_echo("scan", &base)?, &result.to_table(), spec.seed)?;
    println!("wrote {}", paths.csv.display());
    Ok(())
}
