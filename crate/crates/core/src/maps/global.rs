//! The global return `T1` from the exit cylinder back to the entry disk.

use super::params::{GlobalMapConfig, ModulationProfile};
use super::point::{DiskPoint, LiftedPoint};
use super::MapError;

/// `r0 = mu alpha(phi) + eps_r z`, `phi0 = n phi + phi* + mu beta(phi) + eps_phi z`.
///
/// The output angle is a lift: for `n = 1` it follows the input lift, for
/// `n = 0` it carries no winding.
pub fn global_map_t1(
    point: LiftedPoint,
    profile: &ModulationProfile,
    cfg: &GlobalMapConfig,
) -> Result<DiskPoint, MapError> {
    if point.z < 0.0 {
        return Err(MapError::NegativeHeight { z: point.z });
    }
    let phi = point.phi_lift;
    let r0 = cfg.mu * profile.alpha(phi) + cfg.eps_r * point.z;
    if !(r0 < 1.0) {
        return Err(MapError::Range { r0 });
    }
    let phi0 = cfg.n.as_f64() * phi + cfg.phi_star + cfg.mu * profile.beta(phi) + cfg.eps_phi * point.z;
    Ok(DiskPoint::new(r0, phi0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Winding;

    #[test]
    fn constant_profile_examples() {
        let prof = ModulationProfile::constant();
        let cfg = GlobalMapConfig::with_coupling(0.01, 0.0, Winding::One, 0.0, 0.0, &prof).unwrap();
        let out = global_map_t1(LiftedPoint::new(0.0, 2.2), &prof, &cfg).unwrap();
        assert_eq!((out.r, out.phi_lift), (0.01, 2.2));

        let cfg0 = GlobalMapConfig::with_coupling(0.01, 1.3, Winding::Zero, 0.0, 0.0, &prof).unwrap();
        for theta in [0.0, 1.0, 4.0, 100.0] {
            let out = global_map_t1(LiftedPoint::new(0.0, theta), &prof, &cfg0).unwrap();
            assert_eq!((out.r, out.phi_lift), (0.01, 1.3));
        }
    }

    #[test]
    fn z_coupling_enters_radius() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        let cfg = GlobalMapConfig::with_coupling(0.01, 0.4, Winding::One, 0.05, 0.0, &prof).unwrap();
        let out = global_map_t1(LiftedPoint::new(0.2, 0.0), &prof, &cfg).unwrap();
        assert!((out.r - 0.02).abs() < 1e-16);
        assert!((out.phi_lift - 0.4).abs() < 1e-16);
    }

    #[test]
    fn radius_outside_disk_is_a_range_error() {
        let prof = ModulationProfile::constant();
        let cfg = GlobalMapConfig::new(0.5, 0.0, Winding::One, &prof).unwrap();
        assert!(matches!(
            global_map_t1(LiftedPoint::new(10.0, 0.0), &prof, &cfg),
            Err(MapError::Range { .. })
        ));
    }
}
