//! Passage past the saddle-focus: closed-form map `T0` and a numerical
//! oracle integrating the linear flow in polar coordinates.

use super::params::SaddleFocusParams;
use super::point::{DiskPoint, LiftedPoint};
use super::MapError;
use serde::{Deserialize, Serialize};

/// Time to travel from radius `r0` on the entry disk to the exit cylinder `r = 1`.
pub fn transition_time(r0: f64, p: &SaddleFocusParams) -> Result<f64, MapError> {
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(MapError::RadiusDomain { r0 });
    }
    Ok(-r0.ln() / p.rho())
}

/// `T0: (r0, phi0) -> (z1, phi1) = (r0^nu, phi0 + (omega/rho) ln(1/r0))`.
/// The returned angle is the unreduced lift of the input lift.
pub fn local_map_t0(point: DiskPoint, p: &SaddleFocusParams) -> Result<LiftedPoint, MapError> {
    let r0 = point.r;
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(MapError::RadiusDomain { r0 });
    }
    let z1 = r0.powf(p.saddle_index());
    let increment = -p.omega_over_rho() * r0.ln();
    Ok(LiftedPoint::new(z1, point.phi_lift + increment))
}

/// State of the linear flow `r' = rho r, phi' = omega, z' = -lambda z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowState {
    pub t: f64,
    pub r: f64,
    pub phi_lift: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowStop {
    /// Stop on reaching the exit cylinder `r = 1`.
    ExitCylinder,
    /// Stop at the given time.
    Time(f64),
}

/// Fixed RK4 step used by the oracle (in time units of the slowest rate).
pub const DEFAULT_ORACLE_STEP: f64 = 1e-3;
const EVENT_TOL: f64 = 1e-12;

fn rk4_step(s: &FlowState, h: f64, p: &SaddleFocusParams) -> FlowState {
    let (rho, lam, om) = (p.rho(), p.lambda(), p.omega());
    let f = |r: f64, z: f64| (rho * r, om, -lam * z);
    let (k1r, k1p, k1z) = f(s.r, s.z);
    let (k2r, k2p, k2z) = f(s.r + 0.5 * h * k1r, s.z + 0.5 * h * k1z);
    let (k3r, k3p, k3z) = f(s.r + 0.5 * h * k2r, s.z + 0.5 * h * k2z);
    let (k4r, k4p, k4z) = f(s.r + h * k3r, s.z + h * k3z);
    FlowState {
        t: s.t + h,
        r: s.r + h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        phi_lift: s.phi_lift + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        z: s.z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
    }
}

/// Integrates the linear saddle-focus flow from `(r0, phi0, z0)` with fixed
/// RK4 steps of size `step`. For [`FlowStop::ExitCylinder`] the crossing of
/// `r = 1` is localized by bisection on the length of the last step until the
/// bracket is below `1e-12` in time.
///
/// Accepts parameters built with [`SaddleFocusParams::relaxed`].
pub fn flow_oracle(
    r0: f64,
    phi0: f64,
    z0: f64,
    p: &SaddleFocusParams,
    stop: FlowStop,
    step: f64,
) -> Result<FlowState, MapError> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(MapError::RadiusDomain { r0 });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(MapError::invalid("step", format!("{step} is not > 0")));
    }
    let mut s = FlowState {
        t: 0.0,
        r: r0,
        phi_lift: phi0,
        z: z0,
    };
    match stop {
        FlowStop::Time(t_end) => {
            if !(t_end >= 0.0) {
                return Err(MapError::invalid("t_end", format!("{t_end} is negative")));
            }
            let n = (t_end / step).ceil() as usize;
            if n == 0 {
                return Ok(s);
            }
            let h = t_end / n as f64;
            for _ in 0..n {
                s = rk4_step(&s, h, p);
            }
            s.t = t_end;
            Ok(s)
        }
        FlowStop::ExitCylinder => {
            if r0 >= 1.0 {
                return Ok(s);
            }
            loop {
                let next = rk4_step(&s, step, p);
                if next.r >= 1.0 {
                    let (mut lo, mut hi) = (0.0, step);
                    while hi - lo > EVENT_TOL {
                        let mid = 0.5 * (lo + hi);
                        if rk4_step(&s, mid, p).r >= 1.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    return Ok(rk4_step(&s, 0.5 * (lo + hi), p));
                }
                s = next;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn p(rho: f64, lambda: f64, omega: f64) -> SaddleFocusParams {
        SaddleFocusParams::new(rho, lambda, omega).unwrap()
    }

    #[test]
    fn transition_time_examples() {
        let q = p(1.0, 2.0, 1.0);
        assert_eq!(transition_time(1.0, &q).unwrap(), 0.0);
        assert!((transition_time(1.0 / E, &q).unwrap() - 1.0).abs() < 1e-15);
        let q2 = p(2.0, 3.0, 1.0);
        assert!((transition_time(0.5, &q2).unwrap() - 2f64.ln() / 2.0).abs() < 1e-15);
        assert!(transition_time(0.0, &q).is_err());
        assert!(transition_time(1.5, &q).is_err());
    }

    #[test]
    fn local_map_examples() {
        let out = local_map_t0(DiskPoint::new(1.0, 0.7), &p(1.0, 3.0, 5.0)).unwrap();
        assert_eq!((out.z, out.phi_lift), (1.0, 0.7));

        let out = local_map_t0(DiskPoint::new(1.0 / E, 0.0), &p(1.0, 2.0, 3.0)).unwrap();
        assert!((out.z - (-2.0f64).exp()).abs() < 1e-15);
        assert!((out.phi_lift - 3.0).abs() < 1e-14);

        let out = local_map_t0(DiskPoint::new(0.5, 1.0), &p(1.0, 1.5, 2.0)).unwrap();
        assert!((out.z - 0.5f64.powf(1.5)).abs() < 1e-15);
        assert!((out.phi_lift - (1.0 + 2.0 * 2f64.ln())).abs() < 1e-14);

        assert!(local_map_t0(DiskPoint::new(0.0, 0.0), &p(1.0, 2.0, 1.0)).is_err());
    }

    #[test]
    fn oracle_boundary_and_arrival_time() {
        let q = p(1.0, 2.0, 1.0);
        let s = flow_oracle(1.0, 0.0, 1.0, &q, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP).unwrap();
        assert_eq!((s.t, s.r, s.phi_lift, s.z), (0.0, 1.0, 0.0, 1.0));
        let s = flow_oracle(0.25, 0.0, 1.0, &q, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP).unwrap();
        assert!((s.t - 4f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn oracle_matches_closed_form() {
        let q = p(1.0, 1.5, 2.0);
        let s = flow_oracle(0.5, 1.0, 1.0, &q, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP).unwrap();
        let m = local_map_t0(DiskPoint::new(0.5, 1.0), &q).unwrap();
        assert!((s.z - m.z).abs() < 1e-8);
        assert!((s.phi_lift - m.phi_lift).abs() < 1e-8);
    }

    #[test]
    fn relaxed_params_run_in_the_oracle() {
        let q = SaddleFocusParams::relaxed(1.0, 0.5, 1.0).unwrap();
        let s = flow_oracle(0.5, 0.0, 1.0, &q, FlowStop::Time(1.0), DEFAULT_ORACLE_STEP).unwrap();
        assert!((s.r - 0.5 * E).abs() < 1e-12);
        assert!((s.z - (-0.5f64).exp()).abs() < 1e-12);
    }
}
