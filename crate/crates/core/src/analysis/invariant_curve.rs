//! Invariant graphs `z = h(φ)` of degree-one annulus maps by graph transform.

use super::AnalysisError;
use crate::maps::{AnnulusMap, CircleCurve, LiftedPoint, PeriodicSpline, DEFAULT_CURVE_GRID};
use rand::Rng;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantCurveOptions {
    /// Grid size, a power of two.
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for InvariantCurveOptions {
    fn default() -> Self {
        Self {
            n: DEFAULT_CURVE_GRID,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvariantCurveResult {
    pub curve: CircleCurve,
    pub iterations: usize,
    /// `max_j |h(φ̄(φ_j)) - z̄(φ_j, h(φ_j))|`.
    pub residual: f64,
}

/// Pushes the graph of `h` forward once: returns the image heights resampled
/// on the uniform grid, or the failing interval if the images of the grid
/// phases are not strictly increasing around the circle.
fn push_forward<M: AnnulusMap>(map: &M, h: &CircleCurve) -> Result<CircleCurve, AnalysisError> {
    let phases = h.phases();
    let n = phases.len();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for (phi, z) in phases.iter().zip(h.heights()) {
        let img = map.apply(LiftedPoint::new(*z, *phi))?;
        x.push(img.phi_lift);
        y.push(img.z);
    }
    for j in 0..n {
        let (left, right) = if j + 1 < n { (x[j], x[j + 1]) } else { (x[j], x[0] + TAU) };
        if !(right > left) {
            return Err(AnalysisError::NonInvertible {
                phi_left: phases[j],
                phi_right: if j + 1 < n { phases[j + 1] } else { TAU },
            });
        }
    }
    let spline = PeriodicSpline::new(x, y, TAU)?;
    Ok(CircleCurve::new(phases.iter().map(|p| spline.eval(*p)).collect())?)
}

/// `max_j |h(φ̄_j) - z̄_j|` over the images of the grid points of `h`.
pub fn curve_residual<M: AnnulusMap>(map: &M, h: &CircleCurve) -> Result<f64, AnalysisError> {
    let mut worst: f64 = 0.0;
    for (phi, z) in h.phases().iter().zip(h.heights()) {
        let img = map.apply(LiftedPoint::new(*z, *phi))?;
        worst = worst.max((h.eval(img.phi_lift) - img.z).abs());
    }
    Ok(worst)
}

/// Graph transform started from `h_0`. Requires a degree-one map whose
/// angular component is an orientation-preserving diffeomorphism along the
/// iterated graphs.
pub fn find_invariant_curve<M: AnnulusMap>(
    map: &M,
    h0: impl Fn(f64) -> f64,
    opts: InvariantCurveOptions,
) -> Result<InvariantCurveResult, AnalysisError> {
    if map.degree() != 1 {
        return Err(AnalysisError::InvalidInput {
            name: "map",
            reason: format!("invariant graphs need degree 1, got {}", map.degree()),
        });
    }
    let mut h = CircleCurve::from_fn(opts.n, h0)?;
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let next = push_forward(map, &h)?;
        change = next.sup_distance(&h);
        h = next;
        if change < opts.tol {
            let residual = curve_residual(map, &h)?;
            return Ok(InvariantCurveResult {
                curve: h,
                iterations: it,
                residual,
            });
        }
    }
    Err(AnalysisError::NoConvergence {
        iterations: opts.max_iter,
        residual: change,
    })
}

/// Iterates `seeds` random points with `z` uniform in `[0, z_max]` for
/// `steps` steps and returns the largest final distance `|z - h(φ)|`.
pub fn attraction_distance<M: AnnulusMap, R: Rng>(
    map: &M,
    curve: &CircleCurve,
    seeds: usize,
    steps: usize,
    z_max: f64,
    rng: &mut R,
) -> Result<f64, AnalysisError> {
    let mut worst: f64 = 0.0;
    for _ in 0..seeds {
        let mut p = LiftedPoint::new(rng.gen_range(0.0..z_max), rng.gen_range(0.0..TAU));
        for i in 0..steps {
            p = map
                .apply(p)
                .map_err(|source| AnalysisError::Escape { iterate: i, source })?;
        }
        worst = worst.max((p.z - curve.eval(p.phi_lift)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{GlobalMapConfig, ModulationProfile, RescaledMap, SaddleFocusParams, SingularLimitMap, Winding};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_profile_gives_unit_curve_at_once() {
        let m = SingularLimitMap::new(
            SaddleFocusParams::from_ratios(1.5, 1.0).unwrap(),
            ModulationProfile::constant(),
            0.7,
            Winding::One,
        )
        .unwrap();
        let r = find_invariant_curve(&m, |_| 0.3, InvariantCurveOptions::default()).unwrap();
        assert!(r.curve.heights().iter().all(|h| (h - 1.0).abs() < 1e-15));
        assert!(r.iterations <= 2);
    }

    #[test]
    fn singular_limit_curve_is_pulled_back_profile() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        let m = SingularLimitMap::new(SaddleFocusParams::from_ratios(1.5, 1.0).unwrap(), prof.clone(), 2.1, Winding::One).unwrap();
        let r = find_invariant_curve(&m, |p| prof.alpha(p).powf(1.5), InvariantCurveOptions::default()).unwrap();
        assert!(r.residual < 1e-10, "{}", r.residual);
        let c = m.circle_component();
        for phi in [0.0, 1.0, 2.5, 4.0] {
            use crate::maps::LiftedCircleMap;
            let target = prof.alpha(phi).powf(1.5);
            assert!((r.curve.eval(c.lift(phi)) - target).abs() < 1e-10);
        }
    }

    #[test]
    fn rescaled_curve_attracts() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        let p = SaddleFocusParams::from_ratios(1.5, 1.0).unwrap();
        let cfg = GlobalMapConfig::new(1e-3, 0.0, Winding::One, &prof).unwrap();
        let m = RescaledMap::new(p, prof.clone(), cfg).unwrap();
        let r = find_invariant_curve(&m, |p| prof.alpha(p).powf(1.5), InvariantCurveOptions::default()).unwrap();
        assert!(r.residual < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = attraction_distance(&m, &r.curve, 50, 200, m.zeta_max(), &mut rng).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn degree_zero_is_rejected() {
        let m = SingularLimitMap::new(
            SaddleFocusParams::from_ratios(1.5, 1.0).unwrap(),
            ModulationProfile::constant(),
            0.7,
            Winding::Zero,
        )
        .unwrap();
        assert!(find_invariant_curve(&m, |_| 1.0, InvariantCurveOptions::default()).is_err());
    }
}
