//! Lyapunov exponents of annulus maps and of their circle components.

use funnel_lab::analysis::{circle_lyapunov, lyapunov_exponents_map};
use funnel_lab::maps::{CircleMap, GlobalMapConfig, LiftedPoint, ModulationProfile, RescaledMap, SaddleFocusParams, Winding};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SaddleFocusParams::from_ratios(1.5, 1.0)?;
    for a in [0.3, 0.9] {
        let prof = ModulationProfile::sine(a)?;
        let m = RescaledMap::new(p, prof.clone(), GlobalMapConfig::new(1e-3, 0.0, Winding::One, &prof)?)?;
        let l = lyapunov_exponents_map(&m, LiftedPoint::new(0.5, 0.0), 100_000, 1000)?;
        let c = circle_lyapunov(&CircleMap::new(&p, prof, m.omega_tilde()), 0.0, 100_000, 1000);
        println!("a = {a}: annulus exponents [{:.5}, {:.5}], circle map {c:.5}", l.exponents[0], l.exponents[1]);
    }
    Ok(())
}
