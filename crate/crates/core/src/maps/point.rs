//! Points on the two cross-sections and angle bookkeeping.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A point `(z, φ)` on the cylinder section with the angle reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusPoint {
    pub z: f64,
    pub phi: f64,
}

impl AnnulusPoint {
    pub fn new(z: f64, phi: f64) -> Self {
        Self {
            z,
            phi: reduce_angle(phi),
        }
    }
}

/// A point on the cylinder section whose angle is kept unreduced, so that
/// winding can be counted across iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub z: f64,
    pub phi_lift: f64,
}

impl LiftedPoint {
    pub fn new(z: f64, phi_lift: f64) -> Self {
        Self { z, phi_lift }
    }

    pub fn reduced(&self) -> AnnulusPoint {
        AnnulusPoint::new(self.z, self.phi_lift)
    }
}

impl From<AnnulusPoint> for LiftedPoint {
    fn from(p: AnnulusPoint) -> Self {
        Self {
            z: p.z,
            phi_lift: p.phi,
        }
    }
}

/// A point `(r, φ)` on the disk section entering the neighbourhood of the
/// saddle-focus. The angle is unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub r: f64,
    pub phi_lift: f64,
}

impl DiskPoint {
    pub fn new(r: f64, phi_lift: f64) -> Self {
        Self { r, phi_lift }
    }

    pub fn phi(&self) -> f64 {
        reduce_angle(self.phi_lift)
    }
}
