//! The attracting invariant curve of the rescaled n = 1 map.

use funnel_lab::analysis::{attraction_distance, check_diffeo_condition, find_invariant_curve, InvariantCurveOptions};
use funnel_lab::maps::{GlobalMapConfig, ModulationProfile, RescaledMap, SaddleFocusParams, Winding};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SaddleFocusParams::from_ratios(1.5, 1.0)?;
    let prof = ModulationProfile::sine(0.3)?;
    let d = check_diffeo_condition(&p, &prof);
    println!("sup (omega/rho) alpha'/alpha = {:.6} at phi = {:.4}: {}", d.sup_value, d.argmax_phi, d.satisfied);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for mu in [1e-2, 1e-3, 1e-4] {
        let m = RescaledMap::new(p, prof.clone(), GlobalMapConfig::new(mu, 0.0, Winding::One, &prof)?)?;
        let res = find_invariant_curve(&m, |_| 0.5, InvariantCurveOptions::default())?;
        let dist = attraction_distance(&m, &res.curve, 50, 200, m.zeta_max(), &mut rng)?;
        let h = res.curve.heights();
        let (lo, hi) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        println!(
            "mu {mu:e}: {} iterations, residual {:.2e}, zeta in [{lo:.4}, {hi:.4}], 50 seeds within {dist:.1e}",
            res.iterations, res.residual
        );
    }
    Ok(())
}
