//! Horseshoe alternative, covering-relation certificate and shadowing of
//! random itineraries.

use funnel_lab::analysis::{check_prop2_conditions, horseshoe_certify, shadow_sequence, HorseshoeOptions, DEFAULT_STRICT_MARGIN};
use funnel_lab::maps::{CircleMap, ModulationProfile, SaddleFocusParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SaddleFocusParams::from_ratios(1.5, 5.0)?;
    let prof = ModulationProfile::sine(0.96)?;
    let chk = check_prop2_conditions(&p, &prof, (FRAC_PI_2, 3.0 * FRAC_PI_2), 2, DEFAULT_STRICT_MARGIN);
    println!("alternative {:?}, margin {:.4}", chk.alternative, chk.margin);

    let map = CircleMap::new(&p, prof, 0.0);
    let cert = horseshoe_certify(&map, 2, HorseshoeOptions::default())?;
    for s in &cert.strips {
        println!(
            "strip [{:.4}, {:.4}] -> [{:.3}, {:.3}], |F'| >= {:.4}",
            s.start, s.end, s.image_lo, s.image_hi, s.derivative_lower_bound
        );
    }
    println!("entropy >= {:.4}, Lipschitz slack {:.2e}", cert.entropy_lower_bound, cert.lipschitz_slack);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let symbols: Vec<usize> = (0..12).map(|_| rng.gen_range(0..2)).collect();
        let orbit = shadow_sequence(&map, &cert, &symbols)?;
        println!("{symbols:?} realized from phi = {:.12} (endpoint error {:.1e})", orbit.point, orbit.max_endpoint_error);
    }
    Ok(())
}
