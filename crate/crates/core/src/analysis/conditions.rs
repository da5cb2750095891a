//! Pointwise conditions on the profile: the diffeomorphism bound for the
//! circle map, the stability bound at an n = 0 fixed point, and the two
//! alternatives giving a horseshoe.

use crate::maps::{ModulationProfile, SaddleFocusParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

pub const DEFAULT_CONDITION_GRID: usize = 4096;
/// Margin used when a strict inequality on an open interval is checked on a grid.
pub const DEFAULT_STRICT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffeoCheck {
    pub satisfied: bool,
    /// `sup (omega/rho) alpha'/alpha`, signed.
    pub sup_value: f64,
    pub argmax_phi: f64,
}

/// Signed bound `sup (omega/rho) alpha'(φ)/alpha(φ) < 1`, which keeps the
/// circle-map derivative `1 - (omega/rho) alpha'/alpha` positive. The sup is
/// taken on a 4096-point grid and polished by one Newton step.
pub fn check_diffeo_condition(p: &SaddleFocusParams, profile: &ModulationProfile) -> DiffeoCheck {
    let k = p.omega_over_rho();
    let s = |phi: f64| k * profile.log_derivative(phi);
    let n = DEFAULT_CONDITION_GRID;
    let (mut best_phi, mut best) = (0.0, f64::NEG_INFINITY);
    for j in 0..n {
        let phi = TAU * j as f64 / n as f64;
        let v = s(phi);
        if v > best {
            best = v;
            best_phi = phi;
        }
    }
    let h = 1e-4;
    let (sm, s0, sp) = (s(best_phi - h), best, s(best_phi + h));
    let d1 = (sp - sm) / (2.0 * h);
    let d2 = (sp - 2.0 * s0 + sm) / (h * h);
    if d2 < 0.0 {
        let cand = best_phi - d1 / d2;
        let v = s(cand);
        if v > best && (cand - best_phi).abs() < TAU / n as f64 {
            best = v;
            best_phi = cand;
        }
    }
    DiffeoCheck {
        satisfied: best < 1.0,
        sup_value: best,
        argmax_phi: crate::maps::reduce_angle(best_phi),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityCheck {
    /// `(omega/rho) |alpha'(φ)/alpha(φ)|`.
    pub value: f64,
    pub stable_if_fixed: bool,
}

/// Absolute-value bound `(omega/rho) |alpha'/alpha| < 1` at a phase.
pub fn check_stability_condition(p: &SaddleFocusParams, profile: &ModulationProfile, phi: f64) -> StabilityCheck {
    let value = p.omega_over_rho() * profile.log_derivative(phi).abs();
    StabilityCheck {
        value,
        stable_if_fixed: value < 1.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prop2Alternative {
    /// `alpha' < 0` on the interval and `k ln(alpha(φ1)/alpha(φ2)) > 2π(m+1)`.
    Decreasing,
    /// `k alpha'/alpha > 2` on the interval and
    /// `k ln(alpha(φ2)/alpha(φ1)) > 2(φ2 - φ1) + 2π(m+1)`.
    Increasing,
}

impl Prop2Alternative {
    pub fn number(self) -> u8 {
        match self {
            Prop2Alternative::Decreasing => 1,
            Prop2Alternative::Increasing => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop2Check {
    pub alternative: Option<Prop2Alternative>,
    /// Slack in the integral inequality of the alternative that holds; when
    /// none holds, the larger of the two slacks among alternatives whose
    /// pointwise condition holds, or `-inf` if neither pointwise condition does.
    pub margin: f64,
    pub pointwise_decreasing: bool,
    pub pointwise_increasing: bool,
}

/// Checks the two horseshoe alternatives on `I = [φ1, φ2]`. Pointwise
/// conditions are tested on the open interval at 4096 interior grid points
/// with a strictness margin.
pub fn check_prop2_conditions(
    p: &SaddleFocusParams,
    profile: &ModulationProfile,
    interval: (f64, f64),
    m: usize,
    strict_margin: f64,
) -> Prop2Check {
    let (phi1, phi2) = interval;
    let k = p.omega_over_rho();
    let n = DEFAULT_CONDITION_GRID;
    let mut decreasing = phi2 > phi1;
    let mut increasing = phi2 > phi1;
    for j in 1..=n {
        let phi = phi1 + (phi2 - phi1) * j as f64 / (n + 1) as f64;
        if !(profile.alpha_prime(phi) < -strict_margin) {
            decreasing = false;
        }
        if !(k * profile.log_derivative(phi) > 2.0 + strict_margin) {
            increasing = false;
        }
    }
    let target = TAU * (m as f64 + 1.0);
    let ratio = (profile.alpha(phi1) / profile.alpha(phi2)).ln();
    let slack1 = k * ratio - target;
    let slack2 = -k * ratio - 2.0 * (phi2 - phi1) - target;
    let alternative = if decreasing && slack1 > 0.0 {
        Some(Prop2Alternative::Decreasing)
    } else if increasing && slack2 > 0.0 {
        Some(Prop2Alternative::Increasing)
    } else {
        None
    };
    let margin = match alternative {
        Some(Prop2Alternative::Decreasing) => slack1,
        Some(Prop2Alternative::Increasing) => slack2,
        None => {
            let mut best = f64::NEG_INFINITY;
            if decreasing {
                best = best.max(slack1);
            }
            if increasing {
                best = best.max(slack2);
            }
            best
        }
    };
    Prop2Check {
        alternative,
        margin,
        pointwise_decreasing: decreasing,
        pointwise_increasing: increasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit(k: f64) -> SaddleFocusParams {
        SaddleFocusParams::from_ratios(1.5, k).unwrap()
    }

    #[test]
    fn diffeo_examples() {
        let c = check_diffeo_condition(&unit(1.0), &ModulationProfile::constant());
        assert!(c.satisfied && c.sup_value == 0.0);

        let c = check_diffeo_condition(&unit(1.0), &ModulationProfile::sine(0.6).unwrap());
        assert!(c.satisfied);
        assert!((c.sup_value - 0.75).abs() < 1e-9, "{}", c.sup_value);

        let c = check_diffeo_condition(&unit(1.0), &ModulationProfile::sine(0.8).unwrap());
        assert!(!c.satisfied);
        assert!((c.sup_value - 0.8 / 0.6).abs() < 1e-9);
    }

    #[test]
    fn stability_examples() {
        let c = check_stability_condition(&unit(1.0), &ModulationProfile::constant(), 0.4);
        assert!(c.value == 0.0 && c.stable_if_fixed);
        let prof = ModulationProfile::sine(0.3).unwrap();
        let c = check_stability_condition(&unit(1.0), &prof, 0.0);
        assert!((c.value - 0.3).abs() < 1e-15 && c.stable_if_fixed);
        let c = check_stability_condition(&unit(4.0), &prof, 0.0);
        assert!((c.value - 1.2).abs() < 1e-14 && !c.stable_if_fixed);
    }

    #[test]
    fn prop2_examples() {
        let i = (PI / 2.0, 3.0 * PI / 2.0);
        let c = check_prop2_conditions(&unit(5.0), &ModulationProfile::constant(), i, 2, DEFAULT_STRICT_MARGIN);
        assert!(c.alternative.is_none());

        let c = check_prop2_conditions(&unit(5.0), &ModulationProfile::sine(0.96).unwrap(), i, 2, DEFAULT_STRICT_MARGIN);
        assert_eq!(c.alternative, Some(Prop2Alternative::Decreasing));
        let expect = 5.0 * (1.96f64 / 0.04).ln() - 6.0 * PI;
        assert!((c.margin - expect).abs() < 1e-12);
        assert!((c.margin - 0.609).abs() < 0.01);

        let c = check_prop2_conditions(&unit(5.0), &ModulationProfile::sine(0.90).unwrap(), i, 2, DEFAULT_STRICT_MARGIN);
        assert!(c.alternative.is_none());
        assert!(c.margin < 0.0);
    }
}
