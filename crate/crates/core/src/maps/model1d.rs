//! The one-dimensional return map `z̄ = a z^nu + alpha mu` near a saddle with
//! negative saddle value.

use super::MapError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelMap1d {
    pub a: f64,
    pub nu: f64,
    pub alpha: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFixedPoint {
    pub z: f64,
    pub derivative: f64,
    pub stable: bool,
}

impl ModelMap1d {
    pub fn new(a: f64, nu: f64, alpha: f64, mu: f64) -> Result<Self, MapError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(MapError::invalid("a", format!("{a} is not > 0")));
        }
        if !(nu.is_finite() && nu > 1.0) {
            return Err(MapError::invalid("nu", format!("{nu} is not > 1")));
        }
        if !(alpha * mu >= 0.0) {
            return Err(MapError::invalid("mu", format!("alpha*mu = {} is negative", alpha * mu)));
        }
        Ok(Self { a, nu, alpha, mu })
    }

    pub fn apply(&self, z: f64) -> Result<f64, MapError> {
        if z < 0.0 {
            return Err(MapError::NegativeHeight { z });
        }
        Ok(self.a * z.powf(self.nu) + self.alpha * self.mu)
    }

    pub fn derivative(&self, z: f64) -> f64 {
        self.a * self.nu * z.powf(self.nu - 1.0)
    }

    fn g(&self, z: f64) -> f64 {
        self.a * z.powf(self.nu) + self.alpha * self.mu - z
    }

    /// Minimizer of `g(z) = a z^nu + alpha mu - z`.
    fn g_min_point(&self) -> f64 {
        (1.0 / (self.a * self.nu)).powf(1.0 / (self.nu - 1.0))
    }

    /// All fixed points in increasing order. `g` is convex with `g(0) >= 0`,
    /// so there are zero, one (tangency) or two roots; each is bracketed and
    /// bisected to machine precision. Empty means "no fixed point".
    pub fn fixed_points(&self) -> Vec<ModelFixedPoint> {
        let zm = self.g_min_point();
        let gm = self.g(zm);
        let report = |z: f64| {
            let d = self.derivative(z);
            ModelFixedPoint {
                z,
                derivative: d,
                stable: d.abs() < 1.0,
            }
        };
        if gm > 0.0 {
            return Vec::new();
        }
        if gm == 0.0 {
            return vec![report(zm)];
        }
        let mut out = Vec::with_capacity(2);
        let lower = if self.g(0.0) == 0.0 { 0.0 } else { bisect(|z| self.g(z), 0.0, zm) };
        out.push(report(lower));
        let mut hi = 2.0 * zm.max(1.0);
        while self.g(hi) < 0.0 {
            hi *= 2.0;
        }
        out.push(report(bisect(|z| self.g(z), zm, hi)));
        out
    }

    /// Iterates from `z0` and returns the last iterate.
    pub fn iterate(&self, z0: f64, steps: usize) -> Result<f64, MapError> {
        let mut z = z0;
        for _ in 0..steps {
            z = self.apply(z)?;
        }
        Ok(z)
    }
}

/// Bisection on a sign change of `f` over `[lo, hi]`, run until the bracket
/// stops shrinking in floating point.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
