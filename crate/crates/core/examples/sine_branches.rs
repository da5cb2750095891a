//! Expanding branches of the degree-zero map phi -> A sin(phi) + omega_tilde.

use funnel_lab::analysis::{horseshoe_certify, sine_branch_count, HorseshoeOptions};
use funnel_lab::maps::SineCircleMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for amp in [1.0, 5.0, 10.0, 20.0] {
        let b = sine_branch_count(amp)?;
        let m = (b.full_covers_per_branch as usize).max(2);
        let map = SineCircleMap { amplitude: amp, omega_tilde: 0.0 };
        let cert = horseshoe_certify(&map, m, HorseshoeOptions::default());
        println!(
            "A = {amp}: {} branches, {} full covers each; m = {m} certificate: {}",
            b.branches,
            b.full_covers_per_branch,
            cert.map_or_else(|e| e.to_string(), |c| format!("expansion >= {:.3}", c.expansion_lower_bound))
        );
    }
    Ok(())
}
