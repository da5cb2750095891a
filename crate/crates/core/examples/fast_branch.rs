//! Equilibria and limit cycles of the fast subsystem against the frozen
//! slow variable: the Hopf point, the fold of cycles and the multipliers on
//! both sheets.

use funnel_lab::burster::{fast_ah_point, fast_equilibrium_branch, fast_limit_cycle_continuation, BursterParams, ContinuationOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = BursterParams::with_c(-1.3);
    let ah = fast_ah_point(&p)?;
    println!("Hopf point y = {:.8}, v = {:.8}, {:?}", ah.y_ah, ah.v_ah, ah.criticality);
    let range = (ah.y_ah - 0.5, ah.y_ah + 0.2);
    let eq = fast_equilibrium_branch(range, &p, 11)?;
    for s in &eq.samples {
        println!("  y = {:+.4}: {:?}", s.y, s.object);
    }
    let lc = fast_limit_cycle_continuation(range, &p, 20_000, &ContinuationOptions::default())?;
    if let Some(f) = lc.fold() {
        println!("fold of cycles at y = {:.8}, multiplier {:.9}", f.y, f.multiplier);
    }
    if let Some(h) = lc.hopf() {
        println!("branch ends at y = {:.8}, v = {:.8}", h.y, h.v);
    }
    for (s, c) in lc.cycles().step_by(500) {
        println!("  s = {:.4}, y = {:+.5}: period {:.3}, multiplier {:.6}", s.arclength, s.y, c.period, c.multipliers[1]);
    }
    Ok(())
}
