//! Rotation numbers of the degree-one circle map along omega_tilde, with
//! mode-locked plateaus.

use funnel_lab::analysis::{find_plateaus, rotation_number_locked, PLATEAU_MIN_POINTS, PLATEAU_TOL};
use funnel_lab::maps::{CircleMap, ModulationProfile, SaddleFocusParams};
use std::f64::consts::TAU;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SaddleFocusParams::from_ratios(1.5, 1.0)?;
    let prof = ModulationProfile::sine(0.6)?;
    let n = 128;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let w = TAU * i as f64 / (n - 1) as f64;
        let r = rotation_number_locked(&CircleMap::new(&p, prof.clone(), w), 0.0, 10_000, 32)?;
        values.push(r.value);
        if i % 16 == 0 {
            let lock = r.lock.map_or(String::from("-"), |l| format!("{}/{}", l.p, l.q));
            println!("omega_tilde {w:.4}: rotation {:.6} lock {lock}", r.value);
        }
    }
    for pl in find_plateaus(&values, PLATEAU_TOL, PLATEAU_MIN_POINTS) {
        println!("plateau at {:.6} over points {}..={}", pl.value, pl.start, pl.end);
    }
    Ok(())
}
