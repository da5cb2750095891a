//! Closed-form examples checked by the `selftest` subcommand.

use crate::analysis::{
    check_diffeo_condition, check_stability_condition, find_fixed_points_n0, rotation_number, sine_branch_count,
};
use crate::burster::{rhs, slow_nullcline_position, BursterParams, BursterState};
use crate::maps::{
    flow_oracle, global_map_t1, local_map_t0, transition_time, AnnulusMap, CircleMap, DiskPoint, FlowStop,
    GlobalMapConfig, LiftedCircleMap, LiftedPoint, ModelMap1d, ModulationProfile, SaddleFocusParams, SingularLimitMap,
    Winding, DEFAULT_ORACLE_STEP,
};
use std::f64::consts::{E, FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestCase {
    pub name: &'static str,
    pub expected: f64,
    pub got: f64,
    pub tol: f64,
}

impl SelftestCase {
    pub fn passes(&self) -> bool {
        (self.got - self.expected).abs() <= self.tol
    }
}

fn case(name: &'static str, expected: f64, got: f64, tol: f64) -> SelftestCase {
    SelftestCase { name, expected, got, tol }
}

fn or_nan<T, E>(r: Result<T, E>, f: impl FnOnce(T) -> f64) -> f64 {
    r.map(f).unwrap_or(f64::NAN)
}

/// Evaluates every example; a case whose computation errors gets `NaN`
/// and fails.
pub fn selftest_cases() -> Vec<SelftestCase> {
    let sf = |rho, lam, om| SaddleFocusParams::new(rho, lam, om).expect("valid saddle-focus");
    let ratios = |nu, k| SaddleFocusParams::from_ratios(nu, k).expect("valid ratios");
    let constant = ModulationProfile::constant();
    let sine3 = ModulationProfile::sine(0.3).expect("|a| < 1");
    let mut out = Vec::new();

    out.push(case("transition_time r0=1", 0.0, or_nan(transition_time(1.0, &sf(1.0, 2.0, 1.0)), |t| t), 0.0));
    out.push(case("transition_time r0=1/e", 1.0, or_nan(transition_time(1.0 / E, &sf(1.0, 2.0, 1.0)), |t| t), 1e-15));
    out.push(case(
        "transition_time r0=0.5 rho=2",
        2f64.ln() / 2.0,
        or_nan(transition_time(0.5, &sf(2.0, 3.0, 1.0)), |t| t),
        1e-15,
    ));

    let t0 = local_map_t0(DiskPoint::new(1.0, 0.7), &sf(1.0, 2.0, 3.0));
    out.push(case("T0 r0=1 keeps z", 1.0, or_nan(t0.clone(), |p| p.z), 0.0));
    out.push(case("T0 r0=1 keeps phi", 0.7, or_nan(t0, |p| p.phi_lift), 0.0));
    let t0 = local_map_t0(DiskPoint::new(1.0 / E, 0.0), &sf(1.0, 2.0, 3.0));
    out.push(case("T0 r0=1/e height", (-2.0f64).exp(), or_nan(t0.clone(), |p| p.z), 1e-15));
    out.push(case("T0 r0=1/e angle", 3.0, or_nan(t0, |p| p.phi_lift), 1e-14));

    let p11 = sf(1.0, 2.0, 1.0);
    out.push(case(
        "oracle stops at r=1",
        0.0,
        or_nan(flow_oracle(1.0, 0.0, 1.0, &p11, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP), |s| s.t),
        0.0,
    ));
    out.push(case(
        "oracle arrival from r0=0.25",
        4f64.ln(),
        or_nan(flow_oracle(0.25, 0.0, 1.0, &p11, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP), |s| s.t),
        1e-10,
    ));

    let cfg1 = GlobalMapConfig::with_coupling(0.01, 0.0, Winding::One, 0.0, 0.0, &constant);
    out.push(case(
        "T1 constant n=1 radius",
        0.01,
        or_nan(cfg1.clone().map_err(|_| ()).and_then(|c| global_map_t1(LiftedPoint::new(0.0, 2.2), &constant, &c).map_err(|_| ())), |d| d.r),
        1e-15,
    ));
    out.push(case(
        "T1 constant n=1 angle",
        2.2,
        or_nan(cfg1.map_err(|_| ()).and_then(|c| global_map_t1(LiftedPoint::new(0.0, 2.2), &constant, &c).map_err(|_| ())), |d| d.phi_lift),
        1e-15,
    ));
    let cfg0 = GlobalMapConfig::with_coupling(0.01, 1.3, Winding::Zero, 0.0, 0.0, &constant);
    out.push(case(
        "T1 n=0 collapses angle",
        1.3,
        or_nan(cfg0.map_err(|_| ()).and_then(|c| global_map_t1(LiftedPoint::new(0.0, 4.0), &constant, &c).map_err(|_| ())), |d| d.phi_lift),
        1e-15,
    ));
    let cfg = GlobalMapConfig::with_coupling(0.01, 0.0, Winding::One, 0.05, 0.0, &sine3);
    out.push(case(
        "T1 sine profile radius",
        0.02,
        or_nan(cfg.map_err(|_| ()).and_then(|c| global_map_t1(LiftedPoint::new(0.2, 0.0), &sine3, &c).map_err(|_| ())), |d| d.r),
        1e-15,
    ));

    let sl = SingularLimitMap::new(ratios(1.5, 1.0), sine3.clone(), 2.0, Winding::Zero);
    let img = sl.map_err(|_| ()).and_then(|m| m.apply(LiftedPoint::new(0.4, FRAC_PI_2)).map_err(|_| ()));
    out.push(case("singular limit height at pi/2", 1.3f64.powf(1.5), or_nan(img.clone(), |p| p.z), 1e-12));
    out.push(case("singular limit angle at pi/2", 2.0 - 1.3f64.ln(), or_nan(img, |p| p.phi_lift), 1e-12));

    let circle = CircleMap::new(&ratios(1.5, 1.0), sine3.clone(), 0.0);
    out.push(case("circle map lift degree", TAU, circle.lift(1.1 + TAU) - circle.lift(1.1), 1e-12));
    out.push(case(
        "circle map derivative",
        1.0 - 0.3 * 0.4f64.cos() / (1.0 + 0.3 * 0.4f64.sin()),
        circle.deriv(0.4),
        1e-12,
    ));
    let rigid = |w| CircleMap::new(&ratios(1.5, 1.0), ModulationProfile::constant(), w);
    out.push(case("rigid rotation quarter turn", 0.25, or_nan(rotation_number(&rigid(TAU * 0.25), 0.0, 10_000), |r| r.value), 1e-12));
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    out.push(case("rigid rotation golden mean", golden, or_nan(rotation_number(&rigid(TAU * golden), 0.0, 10_000), |r| r.value), 1e-4));

    out.push(case("diffeo condition constant profile", 0.0, check_diffeo_condition(&ratios(1.5, 1.0), &constant).sup_value, 1e-15));
    out.push(case("stability value a=0.3 k=1", 0.3, check_stability_condition(&ratios(1.5, 1.0), &sine3, 0.0).value, 1e-12));
    out.push(case("stability value a=0.3 k=4", 1.2, check_stability_condition(&ratios(1.5, 4.0), &sine3, 0.0).value, 1e-12));

    let fp = SingularLimitMap::new(ratios(1.5, 1.0), constant.clone(), 8.0, Winding::Zero)
        .map_err(|_| ())
        .and_then(|m| find_fixed_points_n0(&m).map_err(|_| ()));
    out.push(case("constant profile fixed point", 8.0 - TAU, or_nan(fp, |f| f.first().map_or(f64::NAN, |x| x.phi_fp)), 1e-11));

    out.push(case("sine branches A=1", 0.0, or_nan(sine_branch_count(1.0), |b| b.full_covers_per_branch as f64), 0.0));
    out.push(case("sine branches A=pi", 1.0, or_nan(sine_branch_count(PI), |b| b.full_covers_per_branch as f64), 0.0));
    out.push(case("sine branches A=10", 3.0, or_nan(sine_branch_count(10.0), |b| b.full_covers_per_branch as f64), 0.0));

    out.push(case(
        "model map mu=0 fixes 0",
        0.0,
        or_nan(ModelMap1d::new(1.0, 2.0, 1.0, 0.0).and_then(|m| m.apply(0.0)), |z| z),
        0.0,
    ));
    out.push(case(
        "model map mu=0.3 has no fixed point",
        0.0,
        or_nan(ModelMap1d::new(1.0, 2.0, 1.0, 0.3), |m| m.fixed_points().len() as f64),
        0.0,
    ));

    let p = BursterParams::new(0.08, 0.002, 0.3, 0.5).expect("valid burster parameters");
    let d = rhs(BursterState::new(0.0, 0.0, 0.0), &p);
    out.push(case("burster v' at origin", 0.5, d[0], 1e-15));
    out.push(case("burster w' at origin", 0.056, d[1], 1e-15));
    out.push(case("burster y' at origin", 0.0006, d[2], 1e-15));
    let p0 = BursterParams::new(0.08, 0.002, 0.3, 0.0).expect("valid burster parameters");
    out.push(case("burster cubic term", 2.0 / 3.0, rhs(BursterState::new(1.0, 0.0, 0.0), &p0)[0], 1e-15));
    out.push(case("full-system equilibrium residual", 0.0, slow_nullcline_position(&BursterParams::with_c(-1.4)).residual, 1e-12));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_passes() {
        let cases = selftest_cases();
        assert!(cases.len() >= 30);
        for c in &cases {
            assert!(c.passes(), "{c:?}");
        }
    }
}
