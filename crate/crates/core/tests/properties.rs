use approx::assert_relative_eq;
use funnel_lab::analysis::{rotation_number, sine_branch_count};
use funnel_lab::burster::{divergence, jacobian, rhs, BursterParams, BursterState};
use funnel_lab::experiments::{write_outputs, Axis, Cell, Config, ScanSpec, ScanTarget, Table};
use funnel_lab::maps::{
    flow_oracle, local_map_t0, reduce_angle, AnnulusMap, CircleMap, DiskPoint, FlowStop, FullMap, GlobalMapConfig,
    LiftedCircleMap, LiftedPoint, ModelMap1d, ModulationProfile, RescaledMap, SaddleFocusParams, SineCircleMap, Winding,
    DEFAULT_ORACLE_STEP,
};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn saddle() -> impl Strategy<Value = SaddleFocusParams> {
    (0.5..2.0f64, 1.1..3.0f64, 0.2..5.0f64).prop_map(|(rho, nu, om)| SaddleFocusParams::new(rho, nu * rho, om).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t0_agrees_with_flow_oracle(p in saddle(), r0 in 0.05..1.0f64, phi0 in 0.0..TAU) {
        let a = local_map_t0(DiskPoint::new(r0, phi0), &p).unwrap();
        let b = flow_oracle(r0, phi0, 1.0, &p, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP).unwrap();
        prop_assert!((a.z - b.z).abs() < 1e-8);
        prop_assert!((a.phi_lift - b.phi_lift).abs() < 1e-8);
    }

    #[test]
    fn t0_closed_form(p in saddle(), r0 in 0.01..1.0f64, phi0 in -10.0..10.0f64) {
        let a = local_map_t0(DiskPoint::new(r0, phi0), &p).unwrap();
        assert_relative_eq!(a.z, r0.powf(p.saddle_index()), max_relative = 1e-12);
        assert_relative_eq!(a.phi_lift, phi0 - p.omega_over_rho() * r0.ln(), epsilon = 1e-12);
    }

    #[test]
    fn rescaled_map_is_conjugate_to_full_map(
        a in 0.0..0.9f64,
        nu in 1.2..3.0f64,
        k in 0.5..4.0f64,
        log_mu in -4.0..-2.0f64,
        zeta in 0.0..1.5f64,
        phi in 0.0..TAU,
    ) {
        let prof = ModulationProfile::sine(a).unwrap();
        let p = SaddleFocusParams::from_ratios(nu, k).unwrap();
        let mu = 10f64.powf(log_mu);
        let cfg = GlobalMapConfig::new(mu, 0.3, Winding::One, &prof).unwrap();
        let full = FullMap::new(p, prof.clone(), cfg).unwrap();
        let resc = RescaledMap::new(p, prof, cfg).unwrap();
        let x = resc.apply(LiftedPoint::new(zeta, phi)).unwrap();
        let y = full.apply(LiftedPoint::new(resc.unscale(zeta), phi)).unwrap();
        assert_relative_eq!(resc.unscale(x.z), y.z, max_relative = 1e-10);
        prop_assert!(angle_gap(x.phi_lift, y.phi_lift) < 1e-9);
    }

    #[test]
    fn circle_map_lift_has_degree_one(a in 0.0..0.95f64, k in 0.1..6.0f64, w in 0.0..TAU, phi in -20.0..20.0f64) {
        let m = CircleMap::new(&SaddleFocusParams::from_ratios(1.5, k).unwrap(), ModulationProfile::sine(a).unwrap(), w);
        assert_relative_eq!(m.lift(phi + TAU) - m.lift(phi), TAU, epsilon = 1e-9);
        let h = 1e-6;
        assert_relative_eq!(m.deriv(phi), (m.lift(phi + h) - m.lift(phi - h)) / (2.0 * h), epsilon = 1e-6);
    }

    #[test]
    fn sine_map_lift_has_degree_zero(amp in 0.1..20.0f64, w in 0.0..TAU, phi in -20.0..20.0f64) {
        let m = SineCircleMap { amplitude: amp, omega_tilde: w };
        prop_assert!((m.lift(phi + TAU) - m.lift(phi)).abs() < 1e-9);
        let b = sine_branch_count(amp).unwrap();
        prop_assert_eq!(b.full_covers_per_branch, (2.0 * amp / TAU).floor() as u64);
    }

    #[test]
    fn rigid_rotation_number(frac in 0.0..1.0f64) {
        let m = CircleMap::new(&SaddleFocusParams::from_ratios(1.5, 1.0).unwrap(), ModulationProfile::constant(), TAU * frac);
        let r = rotation_number(&m, 0.3, 10_000).unwrap();
        prop_assert!((r.value - frac).abs() < 1e-9 || (r.value - frac).abs() > 1.0 - 1e-9);
    }

    #[test]
    fn reduced_angle_is_congruent(phi in -1e3..1e3f64) {
        let r = reduce_angle(phi);
        prop_assert!((0.0..TAU).contains(&r));
        let turns = (phi - r) / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn model_map_fixed_points_solve_the_equation(a in 0.2..3.0f64, nu in 1.2..3.0f64, mu in 0.0..0.05f64) {
        let m = ModelMap1d::new(a, nu, 1.0, mu).unwrap();
        for fp in m.fixed_points() {
            let img = m.apply(fp.z).unwrap();
            prop_assert!((img - fp.z).abs() < 1e-12);
            prop_assert_eq!(fp.stable, fp.derivative.abs() < 1.0);
        }
    }

    #[test]
    fn burster_divergence_is_jacobian_trace(v in -3.0..3.0f64, w in -2.0..2.0f64, y in -2.0..2.0f64, c in -1.5..-0.9f64) {
        let p = BursterParams::with_c(c);
        let s = BursterState::new(v, w, y);
        let j = jacobian(s, &p);
        assert_relative_eq!(divergence(s, &p), j[0][0] + j[1][1] + j[2][2], epsilon = 1e-14);
        let h = 1e-6;
        for col in 0..3 {
            let mut up = s.to_array();
            let mut dn = s.to_array();
            up[col] += h;
            dn[col] -= h;
            let (fu, fd) = (rhs(BursterState::from_array(up), &p), rhs(BursterState::from_array(dn), &p));
            for row in 0..3 {
                assert_relative_eq!(j[row][col], (fu[row] - fd[row]) / (2.0 * h), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn axis_values_keep_endpoints(min in -5.0..5.0f64, span in 0.1..10.0f64, count in 2usize..200) {
        let lin = Axis::linear("a", min, min + span, count).values();
        prop_assert_eq!(lin.len(), count);
        prop_assert_eq!(lin[0], min);
        prop_assert_eq!(lin[count - 1], min + span);
        prop_assert!(lin.windows(2).all(|w| w[1] > w[0]));
        let lo = min.abs() + 0.01;
        let log = Axis::log("mu", lo, lo + span, count).values();
        prop_assert!(log.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(log[count - 1], lo + span);
    }

    #[test]
    fn scan_has_one_point_per_grid_cell(n1 in 2usize..20, n2 in 2usize..20) {
        let spec = ScanSpec {
            target: ScanTarget::CircleMap,
            analysis: "rotation_number".into(),
            axes: vec![Axis::linear("omega_tilde", 0.0, TAU, n1), Axis::linear("a", 0.0, 0.9, n2)],
            seed: 0,
        };
        prop_assert!(spec.validate().is_ok());
        let pts = spec.points();
        prop_assert_eq!(pts.len(), n1 * n2);
        prop_assert_eq!(spec.len(), n1 * n2);
        // last axis fastest
        prop_assert_eq!(&pts[1].coords, &vec![0, 1]);
        prop_assert!(pts.iter().enumerate().all(|(i, p)| p.index == i));
    }

    #[test]
    fn csv_floats_reload_bit_exactly(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 1..40)) {
        let mut t = Table::new(&["x"]);
        for x in &xs {
            t.push(vec![Cell::F(*x)]);
        }
        let bytes = t.to_csv().unwrap();
        let mut rdr = csv::Reader::from_reader(bytes.as_slice());
        let back: Vec<f64> = rdr.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
        prop_assert_eq!(back.len(), xs.len());
        for (a, b) in xs.iter().zip(&back) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn json_floats_reload_bit_exactly(xs in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..20)) {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&["x"]);
        for x in &xs {
            t.push(vec![Cell::F(*x)]);
        }
        let spec = serde_json::json!({"subcommand": "test", "config": {}});
        let paths = write_outputs(dir.path(), "test", &spec, &t, 0).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(paths.json).unwrap()).unwrap();
        let recs = doc["records"].as_array().unwrap();
        prop_assert_eq!(recs.len(), xs.len());
        for (r, x) in recs.iter().zip(&xs) {
            prop_assert_eq!(r["x"].as_f64().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn config_round_trips_through_toml(mu in 1e-6..1e-1f64, a in 0.0..0.9f64, seed in any::<u64>()) {
        let mut c = Config::default();
        c.global.mu = mu;
        c.profile.a = a;
        c.run.seed = seed;
        let back = Config::from_toml(&c.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    d.min(TAU - d)
}
