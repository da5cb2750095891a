//! Lyapunov exponents of annulus and circle maps.

use super::AnalysisError;
use crate::maps::{AnnulusMap, LiftedCircleMap, LiftedPoint};
use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

/// Per-iteration floor for exponents that are `-inf` in exact arithmetic,
/// such as the height direction of the singular-limit map.
pub const LYAPUNOV_FLOOR: f64 = -50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapLyapunov {
    /// Sorted descending.
    pub exponents: [f64; 2],
    pub iterations: usize,
    pub transient: usize,
}

/// The leading exponent follows one renormalized tangent vector; the second
/// is the mean of `ln|det J|` minus the first, floored at [`LYAPUNOV_FLOOR`].
pub fn lyapunov_exponents_map<M: AnnulusMap>(
    map: &M,
    seed: LiftedPoint,
    n: usize,
    transient: usize,
) -> Result<MapLyapunov, AnalysisError> {
    if n < 10_000 {
        return Err(AnalysisError::InvalidInput {
            name: "iterations",
            reason: format!("{n} < 10000"),
        });
    }
    let step = |p: LiftedPoint, i: usize| map.apply(p).map_err(|source| AnalysisError::Escape { iterate: i, source });
    let mut x = seed;
    for i in 0..transient {
        x = step(x, i)?;
    }
    let mut v = Vector2::new(0.6, 0.8);
    let mut sum1 = 0.0;
    let mut sum_det = 0.0;
    for i in 0..n {
        let j = map
            .jacobian(x)
            .map_err(|source| AnalysisError::Escape { iterate: transient + i, source })?;
        let w = j * v;
        let norm = w.norm();
        sum1 += if norm > 0.0 { norm.ln().max(LYAPUNOV_FLOOR) } else { LYAPUNOV_FLOOR };
        v = if norm > 0.0 { w / norm } else { Vector2::new(0.6, 0.8) };
        sum_det += j.determinant().abs().ln();
        x = step(x, transient + i)?;
    }
    let l1 = sum1 / n as f64;
    let l2 = (sum_det / n as f64 - l1).max(LYAPUNOV_FLOOR);
    let mut exponents = [l1, l2];
    if exponents[1] > exponents[0] {
        exponents.swap(0, 1);
    }
    Ok(MapLyapunov {
        exponents,
        iterations: n,
        transient,
    })
}

/// Mean of `ln|F'|` along an orbit of a circle map.
pub fn circle_lyapunov<M: LiftedCircleMap>(map: &M, phi0: f64, n: usize, transient: usize) -> f64 {
    let mut phi = phi0;
    for _ in 0..transient {
        phi = map.lift(phi);
    }
    let mut sum = 0.0;
    for _ in 0..n {
        let d = map.deriv(phi).abs();
        sum += if d > 0.0 { d.ln().max(LYAPUNOV_FLOOR) } else { LYAPUNOV_FLOOR };
        phi = map.lift(phi);
    }
    sum / n as f64
}
