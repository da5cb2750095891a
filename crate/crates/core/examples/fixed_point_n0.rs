//! A stable fixed point of the n = 0 map placed at a chosen phase, and how
//! its eigenvalue approaches -(omega/rho) alpha'/alpha as mu shrinks.

use funnel_lab::analysis::{check_stability_condition, find_fixed_points_n0, refine_fixed_point};
use funnel_lab::maps::{GlobalMapConfig, LiftedPoint, ModulationProfile, RescaledMap, SaddleFocusParams, SingularLimitMap, Winding};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 1.0;
    let p = SaddleFocusParams::from_ratios(2.0, k)?;
    let prof = ModulationProfile::sine(0.3)?;
    let target = 1.0;
    let omega_t = target + k * prof.alpha(target).ln();
    let sl = SingularLimitMap::new(p, prof.clone(), omega_t, Winding::Zero)?;
    let fps = find_fixed_points_n0(&sl)?;
    let stab = check_stability_condition(&p, &prof, target);
    println!("stability value {:.6} (stable if < 1): {}", stab.value, stab.stable_if_fixed);
    for fp in &fps {
        println!("singular limit: phi {:.12}, z {:.6}, eigenvalue {:.6}", fp.phi_fp, fp.z_fp, fp.eigenvalues[0].0);
        for mu in [1e-2f64, 1e-3, 1e-4] {
            let cfg = GlobalMapConfig::new(mu, omega_t + k * mu.ln(), Winding::Zero, &prof)?;
            let m = RescaledMap::new(p, prof.clone(), cfg)?;
            let r = refine_fixed_point(&m, LiftedPoint::new(fp.z_fp, fp.phi_fp), k, &prof)?;
            let err = r.eigenvalues.iter().map(|e| (e.0 - fp.predicted_eigenvalue).hypot(e.1)).fold(f64::INFINITY, f64::min);
            println!("  mu {mu:e}: phi {:.10}, eigenvalue error {err:.3e}, stable {}", r.phi_fp, r.stable);
        }
    }
    Ok(())
}
