//! Regime labels along the slow-nullcline offset c.

use funnel_lab::burster::{classify_regime, BursterParams, RegimeOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let o = RegimeOptions::default();
    for c in [-1.46, -1.42, -1.35, -1.2, -1.1, -1.0] {
        let r = classify_regime(&BursterParams::with_c(c), &o)?;
        let attractor = r.attractor.map_or(String::new(), |a| format!(", attractor {}", a.label));
        println!(
            "c = {c}: {} ({} spikes, {} gaps, ISI cv {:.3}{attractor})",
            r.label, r.spikes.count, r.spikes.gaps, r.spikes.isi_cv
        );
    }
    Ok(())
}
