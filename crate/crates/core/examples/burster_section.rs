//! Poincare section through the full-system equilibrium and the flow
//! Lyapunov exponents on the same attractor.

use funnel_lab::burster::integrator::integrate_to;
use funnel_lab::burster::{
    classify_attractor, default_section, flow_lyapunov, poincare_section, standard_seed, AttractorOptions, BursterParams,
    BursterState, FlowLyapunovOptions, IntegratorOptions, SectionOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = BursterParams::with_c(-1.1);
    let start = integrate_to(&p, 0.0, standard_seed(&p).to_array(), 5e3, IntegratorOptions::default())?;
    let start = BursterState::from_array(start);
    let sec = poincare_section(start, &p, default_section(&p), &SectionOptions::default())?;
    let groups = sec.groups();
    println!("{} crossings in {} direction groups, first few:", sec.crossings.len(), groups.len());
    for c in sec.crossings.iter().take(4) {
        println!("  t = {:.3}: (v, y) = ({:.8}, {:.8})", c.t, c.state.v, c.state.y);
    }
    let lyap = flow_lyapunov(start, &p, &FlowLyapunovOptions::default())?;
    println!("exponents {:?}, mean divergence {:.5}", lyap.exponents, lyap.mean_divergence);
    let report = classify_attractor(&groups, Some(&lyap), &AttractorOptions::default());
    println!("attractor: {} ({:?})", report.label, report.pattern);
    Ok(())
}
