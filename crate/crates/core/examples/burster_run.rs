//! Integrates the burster and counts spikes in the voltage trace.

use funnel_lab::burster::{detect_spikes, integrate, slow_nullcline_position, standard_seed, BursterParams, IntegratorOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for c in [-1.46, -1.3, -1.0] {
        let p = BursterParams::with_c(c);
        let eq = slow_nullcline_position(&p);
        let traj = integrate(standard_seed(&p), &p, 5000.0, 0.05, IntegratorOptions::default())?;
        let v: Vec<f64> = traj.y.iter().map(|s| s[0]).collect();
        let spikes = detect_spikes(&traj.t, &v, 0.0, 0.5);
        let last = traj.y.last().copied().unwrap_or_default();
        println!(
            "c = {c}: equilibrium {:?} at v = {:.4}, {} spikes in t <= 5000, final (v, w, y) = ({:.4}, {:.4}, {:.4})",
            eq.kind,
            eq.equilibrium.v,
            spikes.len(),
            last[0],
            last[1],
            last[2]
        );
    }
    Ok(())
}
