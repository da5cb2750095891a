//! One return T = T0 o T1 for both windings, and the rescaled form of the same map.

use funnel_lab::maps::{
    global_map_t1, AnnulusMap, FullMap, GlobalMapConfig, LiftedPoint, ModulationProfile, RescaledMap, SaddleFocusParams,
    Winding,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let prof = ModulationProfile::sine(0.3)?;
    let p = SaddleFocusParams::from_ratios(1.5, 1.0)?;
    let x = LiftedPoint::new(0.2, 1.0);
    for n in [Winding::One, Winding::Zero] {
        let cfg = GlobalMapConfig::new(1e-3, 0.0, n, &prof)?;
        let entry = global_map_t1(x, &prof, &cfg)?;
        let full = FullMap::new(p, prof.clone(), cfg)?;
        let img = full.apply(x)?;
        println!("n = {n:?}: T1 -> (r {:.6e}, phi {:.6}), T -> (z {:.6e}, phi {:.6})", entry.r, entry.phi_lift, img.z, img.phi_lift);

        let resc = RescaledMap::new(p, prof.clone(), cfg)?;
        let y = resc.apply(LiftedPoint::new(resc.rescale(x.z), x.phi_lift))?;
        println!("        rescaled image unscaled: z {:.6e}, omega_tilde {:.6}", resc.unscale(y.z), resc.omega_tilde());
    }
    Ok(())
}
