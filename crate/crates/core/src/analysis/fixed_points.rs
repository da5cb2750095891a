//! Fixed points of the n = 0 maps and their stability.

use super::AnalysisError;
use crate::maps::{reduce_angle, AnnulusMap, LiftedCircleMap, LiftedPoint, ModulationProfile, SingularLimitMap, Winding};
use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub phi_fp: f64,
    pub z_fp: f64,
    /// `(re, im)` pairs, ordered by decreasing modulus.
    pub eigenvalues: [(f64, f64); 2],
    pub stable: bool,
    /// `-(omega/rho) alpha'(φ_fp)/alpha(φ_fp)`.
    pub predicted_eigenvalue: f64,
    /// Max-norm of `F(x) - x` modulo 2π in the angle.
    pub residual: f64,
}

pub(crate) fn eigenvalues2(j: &Matrix2<f64>) -> [(f64, f64); 2] {
    let tr = j[(0, 0)] + j[(1, 1)];
    let det = j[(0, 0)] * j[(1, 1)] - j[(0, 1)] * j[(1, 0)];
    let disc = tr * tr / 4.0 - det;
    let mut ev = if disc >= 0.0 {
        let s = disc.sqrt();
        [(tr / 2.0 + s, 0.0), (tr / 2.0 - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [(tr / 2.0, s), (tr / 2.0, -s)]
    };
    let modulus = |e: &(f64, f64)| e.0.hypot(e.1);
    if modulus(&ev[1]) > modulus(&ev[0]) {
        ev.swap(0, 1);
    }
    ev
}

fn angle_residual(img: LiftedPoint, x: LiftedPoint) -> (f64, f64) {
    let d = img.phi_lift - x.phi_lift;
    (img.z - x.z, d - TAU * (d / TAU).round())
}

fn report<M: AnnulusMap>(map: &M, x: LiftedPoint, k: f64, profile: &ModulationProfile) -> Result<FixedPointReport, AnalysisError> {
    let j = map.jacobian(x)?;
    let img = map.apply(x)?;
    let (rz, rp) = angle_residual(img, x);
    let eigenvalues = eigenvalues2(&j);
    Ok(FixedPointReport {
        phi_fp: reduce_angle(x.phi_lift),
        z_fp: x.z,
        stable: eigenvalues.iter().all(|e| e.0.hypot(e.1) < 1.0),
        eigenvalues,
        predicted_eigenvalue: -k * profile.log_derivative(x.phi_lift),
        residual: rz.abs().max(rp.abs()),
    })
}

/// Fixed points of the n = 0 singular-limit map. Roots of
/// `g(φ) = (omega/rho) ln(1/alpha(φ)) + ω̃ - φ - 2πℓ` are bracketed on a
/// 4096-point grid for every admissible `ℓ` and bisected to `1e-12`; roots
/// closer than the grid spacing may be missed.
pub fn find_fixed_points_n0(map: &SingularLimitMap) -> Result<Vec<FixedPointReport>, AnalysisError> {
    if map.n != Winding::Zero {
        return Err(AnalysisError::InvalidInput {
            name: "map",
            reason: "expected an n = 0 map".into(),
        });
    }
    let circle = map.circle_component();
    let n = 4096;
    let grid: Vec<f64> = (0..=n).map(|j| TAU * j as f64 / n as f64).collect();
    let g: Vec<f64> = grid.iter().map(|&p| circle.lift(p) - p).collect();
    let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut roots: Vec<f64> = Vec::new();
    let l_lo = (gmin / TAU).floor() as i64;
    let l_hi = (gmax / TAU).ceil() as i64;
    for l in l_lo..=l_hi {
        let shift = TAU * l as f64;
        let h = |p: f64| circle.lift(p) - p - shift;
        for j in 0..n {
            let (a, b) = (g[j] - shift, g[j + 1] - shift);
            if a == 0.0 {
                roots.push(grid[j]);
            } else if a * b < 0.0 {
                let (mut lo, mut hi) = (grid[j], grid[j + 1]);
                while hi - lo > 1e-12 {
                    let mid = 0.5 * (lo + hi);
                    if (h(mid) > 0.0) == (a > 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
    }
    let mut reduced: Vec<f64> = roots.into_iter().map(reduce_angle).collect();
    reduced.sort_by(|a, b| a.partial_cmp(b).unwrap());
    reduced.dedup_by(|a, b| (*a - *b).abs() < 1e-10);
    if reduced.len() > 1 && (reduced[0] + TAU - reduced[reduced.len() - 1]).abs() < 1e-10 {
        reduced.pop();
    }
    let k = map.params.omega_over_rho();
    reduced
        .into_iter()
        .map(|phi| report(map, LiftedPoint::new(map.height(phi), phi), k, &map.profile))
        .collect()
}

/// Newton refinement of a fixed point of any annulus map, with the angle
/// compared modulo 2π.
pub fn refine_fixed_point<M: AnnulusMap>(
    map: &M,
    guess: LiftedPoint,
    omega_over_rho: f64,
    profile: &ModulationProfile,
) -> Result<FixedPointReport, AnalysisError> {
    let mut x = guess;
    let mut last = f64::INFINITY;
    for _ in 0..50 {
        let img = map.apply(x)?;
        let (rz, rp) = angle_residual(img, x);
        last = rz.abs().max(rp.abs());
        if last < 1e-14 {
            return report(map, x, omega_over_rho, profile);
        }
        let a = map.jacobian(x)? - Matrix2::identity();
        let step = a
            .lu()
            .solve(&Vector2::new(-rz, -rp))
            .ok_or(AnalysisError::NoConvergence { iterations: 0, residual: last })?;
        x = LiftedPoint::new(x.z + step[0], x.phi_lift + step[1]);
        if step.amax() < 1e-15 {
            return report(map, x, omega_over_rho, profile);
        }
    }
    if last < 1e-12 {
        return report(map, x, omega_over_rho, profile);
    }
    Err(AnalysisError::NoConvergence {
        iterations: 50,
        residual: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{GlobalMapConfig, RescaledMap, SaddleFocusParams};

    fn sl(prof: ModulationProfile, omega_tilde: f64) -> SingularLimitMap {
        SingularLimitMap::new(SaddleFocusParams::from_ratios(1.5, 1.0).unwrap(), prof, omega_tilde, Winding::Zero).unwrap()
    }

    #[test]
    fn constant_profile_fixed_point() {
        let fps = find_fixed_points_n0(&sl(ModulationProfile::constant(), 8.0)).unwrap();
        assert_eq!(fps.len(), 1);
        assert!((fps[0].phi_fp - (8.0 - TAU)).abs() < 1e-11);
        assert_eq!(fps[0].z_fp, 1.0);
        assert!(fps[0].stable);
        assert_eq!(fps[0].eigenvalues, [(0.0, 0.0), (0.0, 0.0)]);
    }

    #[test]
    fn constructed_target_is_recovered() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        let omega_tilde = 1.0 + prof.alpha(1.0).ln();
        let fps = find_fixed_points_n0(&sl(prof.clone(), omega_tilde)).unwrap();
        let fp = fps.iter().find(|f| (f.phi_fp - 1.0).abs() < 1e-6).expect("target root");
        assert!((fp.phi_fp - 1.0).abs() < 1e-10);
        let lead = fp.eigenvalues.iter().find(|e| e.0.abs() > 1e-12).unwrap();
        assert!((lead.0 - fp.predicted_eigenvalue).abs() < 1e-8);
        let m = sl(prof, omega_tilde);
        let j = m.jacobian(LiftedPoint::new(fp.z_fp, fp.phi_fp)).unwrap();
        for e in fp.eigenvalues {
            let det = (j[(0, 0)] - e.0) * (j[(1, 1)] - e.0) - j[(0, 1)] * j[(1, 0)];
            assert!(det.abs() < 1e-8);
        }
    }

    #[test]
    fn rescaled_fixed_point_newton() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        let p = SaddleFocusParams::from_ratios(2.0, 1.0).unwrap();
        let mu: f64 = 1e-3;
        let target = 1.0 + prof.alpha(1.0).ln();
        let phi_star = target + mu.ln();
        let cfg = GlobalMapConfig::new(mu, phi_star, Winding::Zero, &prof).unwrap();
        let m = RescaledMap::new(p, prof.clone(), cfg).unwrap();
        let guess = LiftedPoint::new(prof.alpha(1.0).powi(2), 1.0);
        let fp = refine_fixed_point(&m, guess, 1.0, &prof).unwrap();
        assert!(fp.residual < 1e-12);
        assert!(fp.stable);
    }
}
