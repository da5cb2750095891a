//! The subcommands as library calls: each turns a resolved configuration
//! into a table and a one-line summary.

use super::config::{Config, MapKind};
use super::output::{Cell, Table};
use super::scan::{run_scan, topology_name, ScanSpec};
use super::selftest::selftest_cases;
use super::ExperimentError;
use crate::analysis::{
    attraction_distance, check_diffeo_condition, check_prop2_conditions, check_stability_condition, circle_lyapunov,
    find_fixed_points_n0, find_invariant_curve, find_plateaus, horseshoe_certify, lyapunov_exponents_map,
    refine_fixed_point, rotation_number_locked, shadow_sequence, sine_branch_count, HorseshoeOptions,
    InvariantCurveOptions, PLATEAU_MIN_POINTS, PLATEAU_TOL,
};
use crate::burster::integrator::integrate_to;
use crate::burster::{
    classify_regime, default_section, fast_ah_point, fast_equilibrium_branch, fast_limit_cycle_continuation, integrate,
    poincare_section, standard_seed, BranchObject, BursterState, ContinuationOptions, SpecialKind,
};
use crate::maps::{reduce_angle, AnnulusMap, LiftedCircleMap, LiftedPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    IterateMap,
    CircleSweep,
    InvariantCurve,
    CheckProp1,
    CheckProp2,
    CheckProp3,
    Horseshoe,
    SineBranches,
    MapLyapunov,
    BursterRun,
    BursterSection,
    BursterClassify,
    FastBranch,
    Scan,
    Selftest,
}

impl Subcommand {
    pub const ALL: [Subcommand; 15] = [
        Subcommand::IterateMap,
        Subcommand::CircleSweep,
        Subcommand::InvariantCurve,
        Subcommand::CheckProp1,
        Subcommand::CheckProp2,
        Subcommand::CheckProp3,
        Subcommand::Horseshoe,
        Subcommand::SineBranches,
        Subcommand::MapLyapunov,
        Subcommand::BursterRun,
        Subcommand::BursterSection,
        Subcommand::BursterClassify,
        Subcommand::FastBranch,
        Subcommand::Scan,
        Subcommand::Selftest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Subcommand::IterateMap => "iterate-map",
            Subcommand::CircleSweep => "circle-sweep",
            Subcommand::InvariantCurve => "invariant-curve",
            Subcommand::CheckProp1 => "check-prop1",
            Subcommand::CheckProp2 => "check-prop2",
            Subcommand::CheckProp3 => "check-prop3",
            Subcommand::Horseshoe => "horseshoe",
            Subcommand::SineBranches => "sine-branches",
            Subcommand::MapLyapunov => "map-lyapunov",
            Subcommand::BursterRun => "burster-run",
            Subcommand::BursterSection => "burster-section",
            Subcommand::BursterClassify => "burster-classify",
            Subcommand::FastBranch => "fast-branch",
            Subcommand::Scan => "scan",
            Subcommand::Selftest => "selftest",
        }
    }
}

impl std::fmt::Display for Subcommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub table: Table,
    pub summary: String,
    /// Set when the run completed but the analysis failed; the table then
    /// holds whatever was computed.
    pub failure: Option<String>,
}

impl CommandOutput {
    fn ok(table: Table, summary: String) -> Self {
        Self {
            table,
            summary,
            failure: None,
        }
    }
}

/// Runs `sub` on `config`. Commands that fix part of the configuration
/// (such as the winding of the n = 0 check) write it back, so the echoed
/// configuration is the one that was used.
pub fn run_command(sub: Subcommand, config: &mut Config) -> Result<CommandOutput, ExperimentError> {
    if let Some(phi) = config.map.target_phi {
        config.global.omega_tilde = Some(config.omega_tilde_for_target(phi)?);
    }
    if sub == Subcommand::CheckProp3 {
        config.global.n = 0;
    }
    config.validate()?;
    let c = &*config;
    match sub {
        Subcommand::IterateMap => iterate_map(c),
        Subcommand::CircleSweep => circle_sweep(c),
        Subcommand::InvariantCurve => invariant_curve(c),
        Subcommand::CheckProp1 => check_prop1(c),
        Subcommand::CheckProp2 => check_prop2(c),
        Subcommand::CheckProp3 => check_prop3(c),
        Subcommand::Horseshoe => horseshoe(c),
        Subcommand::SineBranches => sine_branches(c),
        Subcommand::MapLyapunov => map_lyapunov(c),
        Subcommand::BursterRun => burster_run(c),
        Subcommand::BursterSection => burster_section(c),
        Subcommand::BursterClassify => burster_classify(c),
        Subcommand::FastBranch => fast_branch(c),
        Subcommand::Scan => scan(c),
        Subcommand::Selftest => selftest(),
    }
}

fn iterate_annulus<M: AnnulusMap>(map: &M, c: &Config) -> CommandOutput {
    let mut t = Table::new(&["iterate", "z", "phi_lift", "phi"]);
    let mut p = LiftedPoint::new(c.map.z0, c.map.phi0);
    t.push(vec![0usize.into(), p.z.into(), p.phi_lift.into(), reduce_angle(p.phi_lift).into()]);
    for i in 1..=c.map.steps {
        match map.apply(p) {
            Ok(q) => p = q,
            Err(e) => {
                return CommandOutput {
                    summary: format!("orbit escaped at iterate {i}: {e}"),
                    failure: Some(e.to_string()),
                    table: t,
                }
            }
        }
        t.push(vec![i.into(), p.z.into(), p.phi_lift.into(), reduce_angle(p.phi_lift).into()]);
    }
    CommandOutput::ok(t, format!("{} iterates, final (z, phi) = ({:.12}, {:.12})", c.map.steps, p.z, reduce_angle(p.phi_lift)))
}

fn iterate_circle<M: LiftedCircleMap>(map: &M, c: &Config) -> CommandOutput {
    let mut t = Table::new(&["iterate", "phi_lift", "phi"]);
    let mut x = c.map.phi0;
    t.push(vec![0usize.into(), x.into(), reduce_angle(x).into()]);
    for i in 1..=c.map.steps {
        x = map.lift(x);
        t.push(vec![i.into(), x.into(), reduce_angle(x).into()]);
    }
    CommandOutput::ok(t, format!("{} iterates, final phi = {:.12}", c.map.steps, reduce_angle(x)))
}

fn iterate_map(c: &Config) -> Result<CommandOutput, ExperimentError> {
    Ok(match c.map.kind {
        MapKind::Full => iterate_annulus(&c.full_map()?, c),
        MapKind::Rescaled => iterate_annulus(&c.rescaled_map()?, c),
        MapKind::Singular => iterate_annulus(&c.singular_map()?, c),
        MapKind::Circle => iterate_circle(&c.circle_map()?, c),
        MapKind::Sine => iterate_circle(&c.sine_map()?, c),
        MapKind::Model1d => {
            let m = c.model_map()?;
            let mut t = Table::new(&["iterate", "z"]);
            let mut z = c.map.z0;
            t.push(vec![0usize.into(), z.into()]);
            for i in 1..=c.map.steps {
                z = match m.apply(z) {
                    Ok(z) => z,
                    Err(e) => {
                        return Ok(CommandOutput {
                            summary: format!("orbit left the domain at iterate {i}: {e}"),
                            failure: Some(e.to_string()),
                            table: t,
                        })
                    }
                };
                t.push(vec![i.into(), z.into()]);
            }
            let fps = m.fixed_points();
            let stable = fps.iter().find(|f| f.stable);
            let note = match stable {
                Some(f) => format!("stable fixed point z* = {:.12} with derivative {:.6}", f.z, f.derivative),
                None => "no stable fixed point".to_string(),
            };
            CommandOutput::ok(t, format!("{} iterates, final z = {z:.12}; {note}", c.map.steps))
        }
    })
}

fn circle_sweep(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let n = c.map.sweep_count;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let w = c.map.sweep_min + (c.map.sweep_max - c.map.sweep_min) * i as f64 / (n - 1) as f64;
        let mut ci = c.clone();
        ci.global.omega_tilde = Some(w);
        let r = match c.map.kind {
            MapKind::Sine => rotation_number_locked(&ci.sine_map()?, c.map.phi0, c.map.rotation_iterations, c.map.max_q)?,
            _ => rotation_number_locked(&ci.circle_map()?, c.map.phi0, c.map.rotation_iterations, c.map.max_q)?,
        };
        rows.push((w, r));
    }
    let values: Vec<f64> = rows.iter().map(|r| r.1.value).collect();
    let mut plateau = vec![false; n];
    let plateaus = find_plateaus(&values, PLATEAU_TOL, PLATEAU_MIN_POINTS);
    for p in &plateaus {
        plateau[p.start..=p.end].iter_mut().for_each(|x| *x = true);
    }
    let mut t = Table::new(&["omega_tilde", "rotation", "lifted_rotation", "convergence", "lock_p", "lock_q", "locked", "plateau"]);
    for ((w, r), pl) in rows.iter().zip(&plateau) {
        let (p, q) = r.lock.map_or((Cell::S(String::new()), Cell::S(String::new())), |l| (Cell::I(l.p), Cell::I(l.q as i64)));
        t.push(vec![(*w).into(), r.value.into(), r.lifted_value.into(), r.convergence_estimate.into(), p, q, r.lock.is_some().into(), (*pl).into()]);
    }
    let locked = rows.iter().filter(|r| r.1.lock.is_some()).count();
    Ok(CommandOutput::ok(
        t,
        format!("{n} values of omega_tilde, {locked} locked, {} plateaus", plateaus.len()),
    ))
}

fn curve_options(c: &Config) -> InvariantCurveOptions {
    InvariantCurveOptions {
        n: c.map.grid,
        tol: c.map.tol,
        max_iter: c.map.max_iter,
    }
}

fn invariant_curve(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let h0 = c.map.h0;
    let (res, unscale): (_, Box<dyn Fn(f64) -> f64>) = match c.map.kind {
        MapKind::Full => (find_invariant_curve(&c.full_map()?, |_| h0, curve_options(c))?, Box::new(|z| z)),
        MapKind::Singular => (find_invariant_curve(&c.singular_map()?, |_| h0, curve_options(c))?, Box::new(|z| z)),
        MapKind::Rescaled => {
            let m = c.rescaled_map()?;
            let res = find_invariant_curve(&m, |_| h0, curve_options(c))?;
            (res, Box::new(move |zeta| m.unscale(zeta)))
        }
        k => return Err(ExperimentError::Config(format!("invariant-curve needs map.kind full, rescaled or singular, got {k:?}"))),
    };
    let mut t = Table::new(&["phi", "height", "z"]);
    for (phi, h) in res.curve.phases().into_iter().zip(res.curve.heights()) {
        t.push(vec![phi.into(), (*h).into(), unscale(*h).into()]);
    }
    Ok(CommandOutput::ok(
        t,
        format!("invariant curve after {} iterations, residual {:.3e}", res.iterations, res.residual),
    ))
}

fn check_prop1(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let d = check_diffeo_condition(&c.saddle_params()?, &c.profile()?);
    let m = c.rescaled_map()?;
    let h0 = c.map.h0;
    let res = match find_invariant_curve(&m, |_| h0, curve_options(c)) {
        Ok(r) => r,
        Err(e) => {
            let msg = format!("condition sup {:.4} ({}); curve search failed: {e}", d.sup_value, verdict(d.satisfied));
            return Ok(CommandOutput {
                table: Table::new(&["phi", "zeta", "z"]),
                summary: msg.clone(),
                failure: Some(msg),
            });
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(c.run.seed);
    let dist = attraction_distance(&m, &res.curve, c.map.attraction_seeds, c.map.attraction_steps, m.zeta_max(), &mut rng)?;
    let mut t = Table::new(&["phi", "zeta", "z"]);
    for (phi, h) in res.curve.phases().into_iter().zip(res.curve.heights()) {
        t.push(vec![phi.into(), (*h).into(), m.unscale(*h).into()]);
    }
    Ok(CommandOutput::ok(
        t,
        format!(
            "condition sup {:.4} ({}), residual {:.3e} after {} iterations, attraction {:.3e} from {} seeds",
            d.sup_value,
            verdict(d.satisfied),
            res.residual,
            res.iterations,
            dist,
            c.map.attraction_seeds
        ),
    ))
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "satisfied"
    } else {
        "violated"
    }
}

fn check_prop2(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let chk = check_prop2_conditions(&c.saddle_params()?, &c.profile()?, c.interval()?, c.map.m, c.map.strict_margin);
    let alt = chk.alternative.map_or(0, |a| a.number() as i64);
    let mut t = Table::new(&["alternative", "margin", "pointwise_decreasing", "pointwise_increasing"]);
    t.push(vec![alt.into(), chk.margin.into(), chk.pointwise_decreasing.into(), chk.pointwise_increasing.into()]);
    let summary = match chk.alternative {
        Some(a) => format!("alternative {}, margin {:.3}", a.number(), truncate3(chk.margin)),
        None => format!("no alternative holds, margin {:.3}", truncate3(chk.margin)),
    };
    Ok(CommandOutput::ok(t, summary))
}

fn check_prop3(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let sl = c.singular_map()?;
    let fps = find_fixed_points_n0(&sl)?;
    let k = c.saddle.omega_over_rho;
    let prof = c.profile()?;
    let mut t = Table::new(&[
        "map", "mu", "phi_fp", "z_fp", "ev1_re", "ev1_im", "ev2_re", "ev2_im", "predicted_eigenvalue", "eigenvalue_error",
        "stability_value", "stable", "residual",
    ]);
    let closest = |ev: &[(f64, f64); 2], pred: f64| ev.iter().map(|e| (e.0 - pred).hypot(e.1)).fold(f64::INFINITY, f64::min);
    let rescaled = c.rescaled_map().ok();
    let mut best_error = f64::NAN;
    for f in &fps {
        let s = check_stability_condition(&c.saddle_params()?, &prof, f.phi_fp);
        let err = closest(&f.eigenvalues, f.predicted_eigenvalue);
        t.push(vec![
            "singular".into(), f64::NAN.into(), f.phi_fp.into(), f.z_fp.into(),
            f.eigenvalues[0].0.into(), f.eigenvalues[0].1.into(), f.eigenvalues[1].0.into(), f.eigenvalues[1].1.into(),
            f.predicted_eigenvalue.into(), err.into(), s.value.into(), f.stable.into(), f.residual.into(),
        ]);
        if let Some(m) = &rescaled {
            if let Ok(r) = refine_fixed_point(m, LiftedPoint::new(f.z_fp, f.phi_fp), k, &prof) {
                let err = closest(&r.eigenvalues, r.predicted_eigenvalue);
                if f.stable && !(best_error <= err) {
                    best_error = err;
                }
                t.push(vec![
                    "rescaled".into(), c.global.mu.into(), r.phi_fp.into(), r.z_fp.into(),
                    r.eigenvalues[0].0.into(), r.eigenvalues[0].1.into(), r.eigenvalues[1].0.into(), r.eigenvalues[1].1.into(),
                    r.predicted_eigenvalue.into(), err.into(), s.value.into(), r.stable.into(), r.residual.into(),
                ]);
            }
        }
    }
    if fps.is_empty() {
        let msg = format!("no fixed point of the n = 0 singular limit at omega_tilde = {:.6}", sl.omega_tilde);
        return Ok(CommandOutput {
            table: t,
            summary: msg.clone(),
            failure: Some(msg),
        });
    }
    let stable = fps.iter().filter(|f| f.stable).count();
    Ok(CommandOutput::ok(
        t,
        format!(
            "{} fixed points ({stable} stable) at omega_tilde = {:.6}; eigenvalue error at mu = {:e}: {:.3e}",
            fps.len(),
            sl.omega_tilde,
            c.global.mu,
            best_error
        ),
    ))
}

fn horseshoe_run<M: LiftedCircleMap>(map: &M, c: &Config) -> Result<CommandOutput, ExperimentError> {
    let opts = HorseshoeOptions {
        grid: c.map.horseshoe_grid,
        ..HorseshoeOptions::default()
    };
    let cert = match horseshoe_certify(map, c.map.m, opts) {
        Ok(cert) => cert,
        Err(e) => {
            return Ok(CommandOutput {
                table: Table::new(&["strip", "start", "end", "image_lo", "image_hi", "derivative_lower_bound", "orientation"]),
                summary: e.to_string(),
                failure: Some(e.to_string()),
            })
        }
    };
    let mut t = Table::new(&["strip", "start", "end", "image_lo", "image_hi", "derivative_lower_bound", "orientation"]);
    for (i, s) in cert.strips.iter().enumerate() {
        t.push(vec![i.into(), s.start.into(), s.end.into(), s.image_lo.into(), s.image_hi.into(), s.derivative_lower_bound.into(), (s.orientation as i64).into()]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.run.seed);
    let mut shadowed = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..c.map.shadow_sequences {
        let symbols: Vec<usize> = (0..c.map.shadow_length).map(|_| rng.gen_range(0..cert.m)).collect();
        if let Ok(o) = shadow_sequence(map, &cert, &symbols) {
            shadowed += 1;
            worst = worst.max(o.max_endpoint_error);
        }
    }
    let summary = format!(
        "m = {} certificate, expansion >= {:.4}, entropy >= {:.4}, {shadowed}/{} sequences of length {} shadowed (max error {worst:.1e})",
        cert.m, cert.expansion_lower_bound, cert.entropy_lower_bound, c.map.shadow_sequences, c.map.shadow_length
    );
    let failure = (shadowed < c.map.shadow_sequences).then(|| summary.clone());
    Ok(CommandOutput { table: t, summary, failure })
}

fn horseshoe(c: &Config) -> Result<CommandOutput, ExperimentError> {
    match c.map.kind {
        MapKind::Sine => horseshoe_run(&c.sine_map()?, c),
        _ => horseshoe_run(&c.circle_map()?, c),
    }
}

fn sine_branches(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let b = sine_branch_count(c.map.amplitude)?;
    let mut t = Table::new(&["amplitude", "branches", "full_covers_per_branch"]);
    t.push(vec![c.map.amplitude.into(), (b.branches as i64).into(), (b.full_covers_per_branch as i64).into()]);
    Ok(CommandOutput::ok(
        t,
        format!("A = {}: {} monotone branches, {} full covers per branch", c.map.amplitude, b.branches, b.full_covers_per_branch),
    ))
}

fn map_lyapunov(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let seed = LiftedPoint::new(c.map.z0, c.map.phi0);
    let (n, tr) = (c.map.lyapunov_iterations, c.map.transient);
    let exps: Vec<f64> = match c.map.kind {
        MapKind::Full => lyapunov_exponents_map(&c.full_map()?, seed, n, tr)?.exponents.to_vec(),
        MapKind::Rescaled => lyapunov_exponents_map(&c.rescaled_map()?, seed, n, tr)?.exponents.to_vec(),
        MapKind::Singular => lyapunov_exponents_map(&c.singular_map()?, seed, n, tr)?.exponents.to_vec(),
        MapKind::Circle => vec![circle_lyapunov(&c.circle_map()?, c.map.phi0, n, tr)],
        MapKind::Sine => vec![circle_lyapunov(&c.sine_map()?, c.map.phi0, n, tr)],
        MapKind::Model1d => return Err(ExperimentError::Config("map-lyapunov does not support map.kind = model1d".into())),
    };
    let mut t = Table::new(&["index", "exponent"]);
    for (i, e) in exps.iter().enumerate() {
        t.push(vec![(i + 1).into(), (*e).into()]);
    }
    let list = exps.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>().join(", ");
    Ok(CommandOutput::ok(t, format!("Lyapunov exponents [{list}] over {n} iterates")))
}

fn burster_start(c: &Config) -> Result<BursterState, ExperimentError> {
    let p = c.burster_params()?;
    Ok(c.burster.start.map_or(standard_seed(&p), BursterState::from_array))
}

fn burster_run(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let p = c.burster_params()?;
    let tr = integrate(burster_start(c)?, &p, c.burster.t_span, c.burster.dt, c.integrator())?;
    let mut t = Table::new(&["t", "v", "w", "y"]);
    for (time, y) in tr.t.iter().zip(&tr.y) {
        t.push(vec![(*time).into(), y[0].into(), y[1].into(), y[2].into()]);
    }
    let last = tr.y.last().copied().unwrap_or([f64::NAN; 3]);
    Ok(CommandOutput::ok(
        t,
        format!("{} samples to t = {}, final (v, w, y) = ({:.6}, {:.6}, {:.6})", tr.t.len(), c.burster.t_span, last[0], last[1], last[2]),
    ))
}

fn burster_section(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let p = c.burster_params()?;
    let mut start = burster_start(c)?;
    if c.burster.t_transient > 0.0 {
        start = BursterState::from_array(integrate_to(&p, 0.0, start.to_array(), c.burster.t_transient, c.integrator())?);
    }
    let o = c.regime_options().section;
    let plane = default_section(&p);
    let mut t = Table::new(&["t", "v", "w", "y", "increasing"]);
    let res = match poincare_section(start, &p, plane, &o) {
        Ok(r) => r,
        Err(e) => {
            return Ok(CommandOutput {
                summary: format!("section at w = {:.6}: {e}", plane.offset),
                failure: Some(e.to_string()),
                table: t,
            })
        }
    };
    for x in &res.crossings {
        t.push(vec![x.t.into(), x.state.v.into(), x.state.w.into(), x.state.y.into(), x.increasing.into()]);
    }
    let groups = res.groups();
    let topo = crate::burster::section_topology(&groups, &c.regime_options().attractor);
    Ok(CommandOutput::ok(
        t,
        format!(
            "{} crossings of w = {:.6} after discarding {}, topology {}",
            res.crossings.len(),
            plane.offset,
            res.discarded,
            topology_name(&topo)
        ),
    ))
}

fn burster_classify(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let p = c.burster_params()?;
    let r = classify_regime(&p, &c.regime_options())?;
    let ex = r.attractor.as_ref().and_then(|a| a.exponents).unwrap_or([f64::NAN; 3]);
    let al = r.attractor.as_ref().map_or(String::new(), |a| a.label.as_str().to_string());
    let topo = r.attractor.as_ref().map_or(String::new(), |a| topology_name(&a.topology).to_string());
    let mut t = Table::new(&[
        "c", "regime", "spikes", "mean_isi", "isi_cv", "gaps", "spikes_per_burst", "attractor", "topology", "lambda1", "lambda2", "lambda3",
        "extensions",
    ]);
    let s = &r.spikes;
    t.push(vec![
        p.c.into(), r.label.as_str().into(), s.count.into(), s.mean_isi.into(), s.isi_cv.into(), s.gaps.into(), s.spikes_per_burst.into(),
        al.clone().into(), topo.into(), ex[0].into(), ex[1].into(), ex[2].into(), r.extensions.into(),
    ]);
    let extra = if al.is_empty() {
        String::new()
    } else {
        format!(", attractor {al} with exponents ({:.4}, {:.4}, {:.4})", ex[0], ex[1], ex[2])
    };
    Ok(CommandOutput::ok(t, format!("c = {}: {} ({} spikes){extra}", p.c, r.label, s.count)))
}

fn fast_branch(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let p = c.burster_params()?;
    let ah = fast_ah_point(&p)?;
    let lo = c.burster.y_min.unwrap_or(ah.y_ah - 0.5);
    let hi = c.burster.y_max.unwrap_or(ah.y_ah + 0.2);
    let eq = fast_equilibrium_branch((lo, hi), &p, 201)?;
    let lc = fast_limit_cycle_continuation((lo, hi), &p, c.burster.branch_steps, &ContinuationOptions::default())?;
    let mut t = Table::new(&[
        "branch", "y", "arclength", "v", "w", "v_min", "v_max", "period", "multiplier1", "multiplier2", "stable",
    ]);
    let nan = f64::NAN;
    for b in [&eq, &lc] {
        for s in &b.samples {
            match &s.object {
                BranchObject::Equilibrium(e) => t.push(vec![
                    "equilibrium".into(), s.y.into(), s.arclength.into(), e.v.into(), e.w.into(), nan.into(), nan.into(), nan.into(),
                    nan.into(), nan.into(), e.stable.into(),
                ]),
                BranchObject::LimitCycle(l) => t.push(vec![
                    "limit_cycle".into(), s.y.into(), s.arclength.into(), l.anchor[0].into(), l.anchor[1].into(), l.v_min.into(),
                    l.v_max.into(), l.period.into(), l.multipliers[0].into(), l.multipliers[1].into(),
                    (l.multipliers[1] < 1.0).into(),
                ]),
            }
        }
        for sp in &b.special_points {
            let kind = match sp.kind {
                SpecialKind::Fold => "fold",
                SpecialKind::AndronovHopf => "hopf",
            };
            t.push(vec![
                kind.into(), sp.y.into(), sp.arclength.into(), sp.v.into(), sp.w.into(), nan.into(), nan.into(), nan.into(),
                sp.multiplier.into(), nan.into(), false.into(),
            ]);
        }
    }
    let fold = lc.fold().map_or("no fold".to_string(), |f| format!("fold at y = {:.6} (multiplier {:.8})", f.y, f.multiplier));
    let hopf = lc.hopf().map_or("no Hopf endpoint".to_string(), |h| format!("Hopf endpoint at y = {:.6}, v = {:.8}", h.y, h.v));
    let failure = (lc.fold().is_none() || lc.hopf().is_none()).then(|| format!("{fold}, {hopf}"));
    Ok(CommandOutput {
        table: t,
        summary: format!("limit-cycle branch: {fold}, {hopf} ({} cycles)", lc.samples.len()),
        failure,
    })
}

fn scan(c: &Config) -> Result<CommandOutput, ExperimentError> {
    let spec = ScanSpec::from_config(c);
    let r = run_scan(&spec, c, c.run.workers)?;
    let errors = r.records.iter().filter(|x| !x.status.is_ok()).count();
    let mut labels: Vec<(String, usize)> = Vec::new();
    for x in &r.records {
        match labels.iter_mut().find(|l| l.0 == x.label) {
            Some(l) => l.1 += 1,
            None => labels.push((x.label.clone(), 1)),
        }
    }
    let counts = labels.iter().map(|(l, n)| format!("{l} {n}")).collect::<Vec<_>>().join(", ");
    Ok(CommandOutput::ok(
        r.to_table(),
        format!("{} {} points ({errors} failed): {counts}", r.records.len(), spec.analysis),
    ))
}

fn selftest() -> Result<CommandOutput, ExperimentError> {
    let mut t = Table::new(&["case", "expected", "got", "tolerance", "pass"]);
    let cases = selftest_cases();
    let mut failed = Vec::new();
    for case in &cases {
        let pass = case.passes();
        if !pass {
            failed.push(case.name);
        }
        t.push(vec![case.name.into(), case.expected.into(), case.got.into(), case.tol.into(), pass.into()]);
    }
    let summary = format!("{}/{} examples pass", cases.len() - failed.len(), cases.len());
    let failure = (!failed.is_empty()).then(|| format!("failing: {}", failed.join(", ")));
    Ok(CommandOutput { table: t, summary, failure })
}

// Truncated toward zero so the printed slack never overstates the computed one.
fn truncate3(x: f64) -> f64 {
    (x * 1e3).trunc() / 1e3
}
