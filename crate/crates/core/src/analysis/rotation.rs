//! Rotation numbers of degree-one circle maps and mode-locking detection.

use super::AnalysisError;
use crate::maps::LiftedCircleMap;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// A rational rotation number `p/q` certified by a periodic orbit.
/// `p` is taken on the lift, so `p/q` may exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lock {
    pub p: i64,
    pub q: u32,
}

impl Lock {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationNumberResult {
    /// Rotation number in turns, reduced to `[0, 1)`.
    pub value: f64,
    /// Unreduced rotation number of the lift.
    pub lifted_value: f64,
    pub iterations: usize,
    /// `|rho_N - rho_{N/2}|`.
    pub convergence_estimate: f64,
    pub lock: Option<Lock>,
}

fn reduce_turns(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `(F^N(φ0) - φ0) / (2πN) mod 1`, with the half-length estimate for comparison.
pub fn rotation_number<M: LiftedCircleMap>(map: &M, phi0: f64, n: usize) -> Result<RotationNumberResult, AnalysisError> {
    if n < 1000 {
        return Err(AnalysisError::InvalidInput {
            name: "iterations",
            reason: format!("{n} < 1000"),
        });
    }
    let half = n / 2;
    let mut phi = phi0;
    let mut rho_half = 0.0;
    for i in 1..=n {
        phi = map.lift(phi);
        if i == half {
            rho_half = (phi - phi0) / (TAU * half as f64);
        }
    }
    let rho = (phi - phi0) / (TAU * n as f64);
    Ok(RotationNumberResult {
        value: reduce_turns(rho),
        lifted_value: rho,
        iterations: n,
        convergence_estimate: (rho - rho_half).abs(),
        lock: None,
    })
}

const ZERO_TOL: f64 = 1e-11;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Looks for a periodic orbit of type `p/q` with `q <= max_q` and
/// `|p/q - estimate| < window`. A sign change of `F^q(φ) - φ - 2πp` on a
/// grid of `grid` phases proves that such an orbit exists, and for a
/// circle homeomorphism that fixes the rotation number at `p/q`. Values
/// within `1e-11` of zero count as a zero, which covers rigid rotations.
pub fn detect_lock<M: LiftedCircleMap>(map: &M, estimate: f64, window: f64, max_q: u32, grid: usize) -> Option<Lock> {
    for q in 1..=max_q {
        let p = (estimate * q as f64).round() as i64;
        if gcd(p, q as i64) != 1 && !(p == 0 && q == 1) {
            continue;
        }
        if ((p as f64 / q as f64) - estimate).abs() >= window {
            continue;
        }
        let shift = TAU * p as f64;
        let g = |phi: f64| {
            let mut x = phi;
            for _ in 0..q {
                x = map.lift(x);
            }
            x - phi - shift
        };
        let first = g(0.0);
        if first.abs() <= ZERO_TOL {
            return Some(Lock { p, q });
        }
        for j in 1..grid {
            let v = g(TAU * j as f64 / grid as f64);
            if v.abs() <= ZERO_TOL || (v > 0.0) != (first > 0.0) {
                return Some(Lock { p, q });
            }
        }
    }
    None
}

/// Rotation number with mode-locking detection. After `n` iterations the
/// lift estimate is within `1/n` of the true value for a homeomorphism, so
/// only fractions in that window are tested. Locked results report exactly
/// `p/q`.
pub fn rotation_number_locked<M: LiftedCircleMap>(
    map: &M,
    phi0: f64,
    n: usize,
    max_q: u32,
) -> Result<RotationNumberResult, AnalysisError> {
    if map.degree() != 1 {
        return Err(AnalysisError::InvalidInput {
            name: "map",
            reason: format!("rotation numbers need degree 1, got {}", map.degree()),
        });
    }
    let mut res = rotation_number(map, phi0, n)?;
    let window = 2.0 / n as f64;
    if let Some(lock) = detect_lock(map, res.lifted_value, window, max_q, 512) {
        res.lifted_value = lock.value();
        res.value = reduce_turns(lock.value());
        res.lock = Some(lock);
    }
    Ok(res)
}

/// A run of at least [`PLATEAU_MIN_POINTS`] consecutive sweep values equal to
/// within [`PLATEAU_TOL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    pub value: f64,
}

pub const PLATEAU_TOL: f64 = 1e-6;
pub const PLATEAU_MIN_POINTS: usize = 3;

pub fn find_plateaus(values: &[f64], tol: f64, min_points: usize) -> Vec<Plateau> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let same = i < values.len() && (values[i] - values[start]).abs() <= tol;
        if !same {
            if i - start >= min_points {
                out.push(Plateau {
                    start,
                    end: i - 1,
                    value: values[start],
                });
            }
            start = i;
        }
    }
    out
}
