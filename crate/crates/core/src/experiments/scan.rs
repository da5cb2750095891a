//! Parameter grids over the map family, the circle map and the burster.
//!
//! Points are evaluated in parallel and assembled in grid order, first axis
//! slowest. Each point gets its own RNG seeded with `seed + index`, so the
//! worker count never changes a record.

use super::config::{Config, MapKind};
use super::output::{Cell, Table};
use super::ExperimentError;
use crate::analysis::{
    check_diffeo_condition, check_prop2_conditions, circle_lyapunov, find_fixed_points_n0, find_invariant_curve,
    find_plateaus, horseshoe_certify, lyapunov_exponents_map, rotation_number_locked, sine_branch_count,
    attraction_distance, AnalysisError, HorseshoeOptions, InvariantCurveOptions, PLATEAU_MIN_POINTS, PLATEAU_TOL,
};
use crate::burster::integrator::integrate_to;
use crate::burster::{analyse_attractor, classify_regime, standard_seed, AttractorReport, BursterState, SectionTopology};
use crate::maps::{AnnulusMap, LiftedCircleMap, LiftedPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanTarget {
    MapFamily,
    CircleMap,
    Burster,
}

impl ScanTarget {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanTarget::MapFamily => "map-family",
            ScanTarget::CircleMap => "circle-map",
            ScanTarget::Burster => "burster",
        }
    }

    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            ScanTarget::MapFamily => &["mu", "a", "s", "omega_over_rho", "nu", "omega_tilde", "phi_star", "amplitude", "eps_r"],
            ScanTarget::CircleMap => &["omega_tilde", "a", "s", "omega_over_rho", "nu", "amplitude"],
            ScanTarget::Burster => &["c", "delta", "mu_slow", "I"],
        }
    }

    pub fn analyses(self) -> &'static [&'static str] {
        match self {
            ScanTarget::MapFamily => &[
                "invariant_curve",
                "diffeo_condition",
                "prop2",
                "horseshoe",
                "fixed_points_n0",
                "map_lyapunov",
                "sine_branches",
                "rotation_number",
            ],
            ScanTarget::CircleMap => &["rotation_number", "circle_lyapunov"],
            ScanTarget::Burster => &["classify_regime", "attractor"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            name: name.into(),
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, count: usize) -> Self {
        Self {
            spacing: Spacing::Log,
            ..Self::linear(name, min, max, count)
        }
    }

    /// Grid values; both ends are included exactly.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == n - 1 {
                    return self.max;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub target: ScanTarget,
    pub analysis: String,
    pub axes: Vec<Axis>,
    pub seed: u64,
}

impl ScanSpec {
    pub fn from_config(c: &Config) -> Self {
        Self {
            target: c.scan.target,
            analysis: c.scan.analysis.clone(),
            axes: c.scan.axes.clone(),
            seed: c.run.seed,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let err = |m: String| Err(ExperimentError::Config(m));
        if self.axes.is_empty() || self.axes.len() > 2 {
            return err(format!("a scan needs 1 or 2 axes, got {}", self.axes.len()));
        }
        if !self.target.analyses().contains(&self.analysis.as_str()) {
            return err(format!(
                "analysis `{}` is not available for {}; choose one of {:?}",
                self.analysis,
                self.target.as_str(),
                self.target.analyses()
            ));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if !self.target.parameters().contains(&a.name.as_str()) {
                return err(format!(
                    "axis `{}` is not a {} parameter; choose one of {:?}",
                    a.name,
                    self.target.as_str(),
                    self.target.parameters()
                ));
            }
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return err(format!("axis `{}` appears twice", a.name));
            }
            if a.count < 2 {
                return err(format!("axis `{}` needs count >= 2, got {}", a.name, a.count));
            }
            if !(a.min.is_finite() && a.max.is_finite()) {
                return err(format!("axis `{}` has a non-finite bound", a.name));
            }
            if a.spacing == Spacing::Log && !(a.min > 0.0 && a.max > 0.0) {
                return err(format!("log axis `{}` needs a positive range, got [{}, {}]", a.name, a.min, a.max));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order, last axis fastest.
    pub fn points(&self) -> Vec<ScanPoint> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect();
        (0..self.len())
            .map(|index| {
                let mut rest = index;
                let mut coords = vec![0; self.axes.len()];
                for k in (0..self.axes.len()).rev() {
                    coords[k] = rest % self.axes[k].count;
                    rest /= self.axes[k].count;
                }
                let params = coords.iter().enumerate().map(|(k, &j)| values[k][j]).collect();
                ScanPoint { index, coords, params }
            })
            .collect()
    }

    pub fn scalar_names(&self) -> &'static [&'static str] {
        scalar_names(&self.analysis)
    }
}

fn scalar_names(analysis: &str) -> &'static [&'static str] {
    match analysis {
        "rotation_number" => &["rotation", "lifted_rotation", "convergence", "lock_p", "lock_q", "plateau"],
        "circle_lyapunov" => &["lyapunov"],
        "invariant_curve" => &["condition_sup", "iterations", "residual", "attraction"],
        "diffeo_condition" => &["condition_sup", "argmax_phi"],
        "prop2" => &["alternative", "margin"],
        "horseshoe" => &["strips", "expansion", "entropy"],
        "fixed_points_n0" => &["count", "stable_count", "phi_fp", "eigenvalue", "predicted_eigenvalue"],
        "map_lyapunov" => &["lambda1", "lambda2"],
        "sine_branches" => &["branches", "covers"],
        "classify_regime" => &["spikes", "mean_isi", "isi_cv", "gaps", "spikes_per_burst", "extensions", "lambda1", "lambda2", "lambda3", "clusters", "curves"],
        "attractor" => &["lambda1", "lambda2", "lambda3", "clusters", "curves", "max_radius"],
        _ => &[],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub index: usize,
    pub coords: Vec<usize>,
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error { kind: String, message: String },
}

impl Status {
    pub fn is_ok(&self) -> bool {
        matches!(self, Status::Ok)
    }

    /// `ok` or `error(kind)`.
    pub fn code(&self) -> String {
        match self {
            Status::Ok => "ok".into(),
            Status::Error { kind, .. } => format!("error({kind})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub point: ScanPoint,
    pub status: Status,
    pub label: String,
    /// Secondary label: the attractor type for burster scans, `p/q` for
    /// locked rotation numbers.
    pub detail: String,
    pub scalars: Vec<f64>,
}

impl ScanRecord {
    pub fn scalar(&self, names: &[&str], name: &str) -> Option<f64> {
        names.iter().position(|n| *n == name).map(|i| self.scalars[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub spec: ScanSpec,
    pub records: Vec<ScanRecord>,
}

impl ScanResult {
    pub fn scalar_names(&self) -> &'static [&'static str] {
        self.spec.scalar_names()
    }

    pub fn scalar(&self, record: usize, name: &str) -> Option<f64> {
        self.records[record].scalar(self.scalar_names(), name)
    }

    pub fn to_table(&self) -> Table {
        let mut cols: Vec<&str> = vec!["index"];
        cols.extend(self.spec.axes.iter().map(|a| a.name.as_str()));
        cols.extend(["status", "label", "detail"]);
        cols.extend(self.scalar_names());
        cols.push("error");
        let mut t = Table::new(&cols);
        for r in &self.records {
            let mut row: Vec<Cell> = vec![r.point.index.into()];
            row.extend(r.point.params.iter().map(|&p| Cell::F(p)));
            row.push(r.status.code().into());
            row.push(r.label.clone().into());
            row.push(r.detail.clone().into());
            row.extend(r.scalars.iter().map(|&x| Cell::F(x)));
            row.push(match &r.status {
                Status::Ok => Cell::S(String::new()),
                Status::Error { message, .. } => Cell::S(message.clone()),
            });
            t.push(row);
        }
        t
    }
}

struct Outcome {
    label: String,
    detail: String,
    scalars: Vec<f64>,
}

impl Outcome {
    fn new(label: impl Into<String>, scalars: Vec<f64>) -> Self {
        Self {
            label: label.into(),
            detail: String::new(),
            scalars,
        }
    }
}

/// Writes one scan coordinate into the configuration.
pub(crate) fn set_parameter(c: &mut Config, name: &str, v: f64) -> Result<(), ExperimentError> {
    match name {
        "mu" => c.global.mu = v,
        "a" => c.profile.a = v,
        "s" => c.profile.s = v,
        "omega_over_rho" => c.saddle.omega_over_rho = v,
        "nu" => c.saddle.nu = v,
        "omega_tilde" => c.global.omega_tilde = Some(v),
        "phi_star" => {
            c.global.phi_star = v;
            c.global.omega_tilde = None;
        }
        "amplitude" => c.map.amplitude = v,
        "eps_r" => c.global.eps_r = v,
        "c" => c.burster.c = v,
        "delta" => c.burster.delta = v,
        "mu_slow" => c.burster.mu_slow = v,
        "I" => c.burster.drive = v,
        other => return Err(ExperimentError::Config(format!("unknown scan parameter `{other}`"))),
    }
    Ok(())
}

fn rotation<M: LiftedCircleMap>(map: &M, c: &Config) -> Result<Outcome, ExperimentError> {
    let r = rotation_number_locked(map, c.map.phi0, c.map.rotation_iterations, c.map.max_q)?;
    let (p, q) = r.lock.map_or((f64::NAN, f64::NAN), |l| (l.p as f64, l.q as f64));
    let mut o = Outcome::new(
        if r.lock.is_some() { "locked" } else { "unlocked" },
        vec![r.value, r.lifted_value, r.convergence_estimate, p, q, 0.0],
    );
    if let Some(l) = r.lock {
        o.detail = format!("{}/{}", l.p, l.q);
    }
    Ok(o)
}

fn circle_component(c: &Config) -> Result<Box<dyn LiftedCircleMap>, ExperimentError> {
    Ok(match c.map.kind {
        MapKind::Sine => Box::new(c.sine_map()?),
        _ => Box::new(c.circle_map()?),
    })
}

fn annulus_map(c: &Config) -> Result<Box<dyn AnnulusMap>, ExperimentError> {
    Ok(match c.map.kind {
        MapKind::Full => Box::new(c.full_map()?),
        MapKind::Rescaled => Box::new(c.rescaled_map()?),
        MapKind::Singular => Box::new(c.singular_map()?),
        k => {
            return Err(ExperimentError::Config(format!(
                "map.kind = {k:?} is not an annulus map; use full, rescaled or singular"
            )))
        }
    })
}

fn topology_counts(t: &SectionTopology) -> (f64, f64, f64) {
    match t {
        SectionTopology::Clusters { radii, .. } => (radii.len() as f64, 0.0, radii.iter().cloned().fold(0.0, f64::max)),
        SectionTopology::ClosedCurves { curves } => (0.0, curves.len() as f64, f64::NAN),
        SectionTopology::Irregular {
            clusters,
            max_radius,
            curves,
        } => (*clusters as f64, curves.len() as f64, *max_radius),
        _ => (0.0, 0.0, f64::NAN),
    }
}

pub(crate) fn topology_name(t: &SectionTopology) -> &'static str {
    match t {
        SectionTopology::Empty => "empty",
        SectionTopology::TooFewPoints { .. } => "too_few_points",
        SectionTopology::Clusters { .. } => "clusters",
        SectionTopology::ClosedCurves { .. } => "closed_curves",
        SectionTopology::Irregular { .. } => "irregular",
    }
}

fn exponents(a: Option<&AttractorReport>) -> [f64; 3] {
    a.and_then(|a| a.exponents).unwrap_or([f64::NAN; 3])
}

fn evaluate(analysis: &str, c: &Config, rng: &mut ChaCha8Rng) -> Result<Outcome, ExperimentError> {
    c.validate()?;
    match analysis {
        "rotation_number" => rotation(&circle_component(c)?, c),
        "circle_lyapunov" => {
            let l = circle_lyapunov(&circle_component(c)?, c.map.phi0, c.map.lyapunov_iterations, c.map.transient);
            Ok(Outcome::new(if l > 0.0 { "expanding" } else { "contracting" }, vec![l]))
        }
        "invariant_curve" => {
            let d = check_diffeo_condition(&c.saddle_params()?, &c.profile()?);
            let map = c.rescaled_map()?;
            let opts = InvariantCurveOptions {
                n: c.map.grid,
                tol: c.map.tol,
                max_iter: c.map.max_iter,
            };
            let h0 = c.map.h0;
            let res = find_invariant_curve(&map, |_| h0, opts)?;
            let dist = attraction_distance(&map, &res.curve, c.map.attraction_seeds, c.map.attraction_steps, map.zeta_max(), rng)?;
            let label = if d.satisfied { "converged" } else { "converged_without_condition" };
            Ok(Outcome::new(label, vec![d.sup_value, res.iterations as f64, res.residual, dist]))
        }
        "diffeo_condition" => {
            let d = check_diffeo_condition(&c.saddle_params()?, &c.profile()?);
            Ok(Outcome::new(if d.satisfied { "satisfied" } else { "violated" }, vec![d.sup_value, d.argmax_phi]))
        }
        "prop2" => {
            let chk = check_prop2_conditions(&c.saddle_params()?, &c.profile()?, c.interval()?, c.map.m, c.map.strict_margin);
            let alt = chk.alternative.map_or(0.0, |a| a.number() as f64);
            let label = chk.alternative.map_or("none".to_string(), |a| format!("alternative_{}", a.number()));
            Ok(Outcome::new(label, vec![alt, chk.margin]))
        }
        "horseshoe" => {
            let map = circle_component(c)?;
            let opts = HorseshoeOptions {
                grid: c.map.horseshoe_grid,
                ..HorseshoeOptions::default()
            };
            match horseshoe_certify(&map, c.map.m, opts) {
                Ok(cert) => Ok(Outcome::new(
                    "certified",
                    vec![cert.strips.len() as f64, cert.expansion_lower_bound, cert.entropy_lower_bound],
                )),
                Err(AnalysisError::NoHorseshoe { found, .. }) => {
                    Ok(Outcome::new("no_horseshoe", vec![found as f64, f64::NAN, f64::NAN]))
                }
                Err(e) => Err(e.into()),
            }
        }
        "fixed_points_n0" => {
            let mut c0 = c.clone();
            c0.global.n = 0;
            let fps = find_fixed_points_n0(&c0.singular_map()?)?;
            let stable = fps.iter().filter(|f| f.stable).count();
            let first = fps.iter().find(|f| f.stable).or(fps.first());
            let (phi, ev, pred) = first.map_or((f64::NAN, f64::NAN, f64::NAN), |f| {
                (f.phi_fp, f.eigenvalues[0].0, f.predicted_eigenvalue)
            });
            let label = if stable > 0 { "stable" } else if fps.is_empty() { "none" } else { "unstable" };
            Ok(Outcome::new(label, vec![fps.len() as f64, stable as f64, phi, ev, pred]))
        }
        "map_lyapunov" => {
            let map = annulus_map(c)?;
            let l = lyapunov_exponents_map(&map, LiftedPoint::new(c.map.z0, c.map.phi0), c.map.lyapunov_iterations, c.map.transient)?;
            Ok(Outcome::new(if l.exponents[0] > 0.0 { "chaotic" } else { "regular" }, l.exponents.to_vec()))
        }
        "sine_branches" => {
            let b = sine_branch_count(c.map.amplitude)?;
            Ok(Outcome::new("ok", vec![b.branches as f64, b.full_covers_per_branch as f64]))
        }
        "classify_regime" => {
            let r = classify_regime(&c.burster_params()?, &c.regime_options())?;
            let [l1, l2, l3] = exponents(r.attractor.as_ref());
            let (k, curves, _) = r.attractor.as_ref().map_or((f64::NAN, f64::NAN, f64::NAN), |a| topology_counts(&a.topology));
            let s = &r.spikes;
            let mut o = Outcome::new(
                r.label.as_str(),
                vec![s.count as f64, s.mean_isi, s.isi_cv, s.gaps as f64, s.spikes_per_burst, r.extensions as f64, l1, l2, l3, k, curves],
            );
            o.detail = r.attractor.map_or(String::new(), |a| a.label.as_str().to_string());
            Ok(o)
        }
        "attractor" => {
            let p = c.burster_params()?;
            let seed = c.burster.start.map_or(standard_seed(&p), BursterState::from_array);
            let start = if c.burster.t_transient > 0.0 {
                BursterState::from_array(integrate_to(&p, 0.0, seed.to_array(), c.burster.t_transient, c.integrator())?)
            } else {
                seed
            };
            let a = analyse_attractor(start, &p, &c.regime_options())?;
            let [l1, l2, l3] = exponents(Some(&a));
            let (k, curves, r) = topology_counts(&a.topology);
            let mut o = Outcome::new(a.label.as_str(), vec![l1, l2, l3, k, curves, r]);
            o.detail = topology_name(&a.topology).to_string();
            Ok(o)
        }
        other => Err(ExperimentError::Config(format!("unknown analysis `{other}`"))),
    }
}

fn error_kind(e: &ExperimentError) -> &'static str {
    match e {
        ExperimentError::Config(_) | ExperimentError::Usage(_) => "config",
        ExperimentError::Analysis(_) => "analysis",
        ExperimentError::Io { .. } => "io",
        ExperimentError::Serialize(_) => "serialize",
    }
}

fn evaluate_point(spec: &ScanSpec, base: &Config, point: ScanPoint) -> ScanRecord {
    let names = spec.scalar_names();
    let mut c = base.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(point.index as u64));
    let result = spec
        .axes
        .iter()
        .zip(&point.params)
        .try_for_each(|(a, &v)| set_parameter(&mut c, &a.name, v))
        .and_then(|_| evaluate(&spec.analysis, &c, &mut rng));
    match result {
        Ok(o) => ScanRecord {
            point,
            status: Status::Ok,
            label: o.label,
            detail: o.detail,
            scalars: o.scalars,
        },
        Err(e) => ScanRecord {
            point,
            status: Status::Error {
                kind: error_kind(&e).into(),
                message: e.to_string(),
            },
            label: "error".into(),
            detail: String::new(),
            scalars: vec![f64::NAN; names.len()],
        },
    }
}

/// Marks rotation numbers that sit on a plateau along the last axis.
fn mark_plateaus(spec: &ScanSpec, records: &mut [ScanRecord]) {
    let names = spec.scalar_names();
    let (Some(ri), Some(pi)) = (
        names.iter().position(|n| *n == "rotation"),
        names.iter().position(|n| *n == "plateau"),
    ) else {
        return;
    };
    let line = spec.axes.last().map_or(1, |a| a.count);
    for chunk in records.chunks_mut(line) {
        let values: Vec<f64> = chunk.iter().map(|r| r.scalars[ri]).collect();
        for r in chunk.iter_mut() {
            if r.status.is_ok() {
                r.scalars[pi] = 0.0;
            }
        }
        for p in find_plateaus(&values, PLATEAU_TOL, PLATEAU_MIN_POINTS) {
            for r in &mut chunk[p.start..=p.end] {
                r.scalars[pi] = 1.0;
            }
        }
    }
}

/// Evaluates the analysis at every grid point with `workers` threads
/// (0 for all cores). Only an invalid spec is an error; per-point failures
/// are recorded in the point's status.
pub fn run_scan(spec: &ScanSpec, base: &Config, workers: usize) -> Result<ScanResult, ExperimentError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::Config(format!("cannot start {workers} workers: {e}")))?;
    let points = spec.points();
    let mut records: Vec<ScanRecord> = pool.install(|| points.into_par_iter().map(|p| evaluate_point(spec, base, p)).collect());
    mark_plateaus(spec, &mut records);
    Ok(ScanResult {
        spec: spec.clone(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle_spec(axes: Vec<Axis>) -> ScanSpec {
        ScanSpec {
            target: ScanTarget::CircleMap,
            analysis: "rotation_number".into(),
            axes,
            seed: 7,
        }
    }

    #[test]
    fn axis_values_hit_both_ends() {
        let a = Axis::log("mu", 1e-4, 1e-2, 3);
        let v = a.values();
        assert_eq!(v[0], 1e-4);
        assert_eq!(v[2], 1e-2);
        assert!((v[1] - 1e-3).abs() < 1e-15);
        assert_eq!(Axis::linear("a", 0.0, 1.0, 5).values(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn invalid_specs_are_config_errors() {
        let bad = [
            circle_spec(vec![Axis::linear("omega_tilde", 0.0, 1.0, 1)]),
            circle_spec(vec![Axis::log("omega_tilde", 0.0, 1.0, 4)]),
            circle_spec(vec![Axis::linear("c", 0.0, 1.0, 4)]),
            circle_spec(vec![]),
            circle_spec(vec![Axis::linear("a", 0.0, 0.5, 2), Axis::linear("a", 0.0, 0.5, 2)]),
            ScanSpec {
                analysis: "classify_regime".into(),
                ..circle_spec(vec![Axis::linear("a", 0.0, 0.5, 2)])
            },
        ];
        for s in bad {
            assert!(matches!(run_scan(&s, &Config::default(), 1), Err(ExperimentError::Config(_))), "{s:?}");
        }
    }

    #[test]
    fn degenerate_scan_has_two_records() {
        let s = circle_spec(vec![Axis::linear("omega_tilde", 0.5, 1.0, 2)]);
        let r = run_scan(&s, &Config::default(), 1).unwrap();
        assert_eq!(r.records.len(), 2);
        let t = r.to_table();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.columns[1], "omega_tilde");
    }

    #[test]
    fn failures_are_recorded_per_point() {
        // |a| >= 1 makes alpha vanish, which the profile rejects
        let s = circle_spec(vec![Axis::linear("a", 0.5, 1.5, 3)]);
        let r = run_scan(&s, &Config::default(), 2).unwrap();
        assert_eq!(r.records.len(), 3);
        assert!(r.records[0].status.is_ok());
        assert_eq!(r.records[2].status.code(), "error(config)");
        assert!(r.records[2].scalars.iter().all(|x| x.is_nan()));
    }

    #[test]
    fn rigid_rotation_plateaus_and_grid_order() {
        let mut c = Config::default();
        c.profile.kind = super::super::config::ProfileKind::Constant;
        c.map.rotation_iterations = 2000;
        let s = circle_spec(vec![Axis::linear("a", 0.1, 0.2, 2), Axis::linear("omega_tilde", 0.0, TAU, 5)]);
        let r = run_scan(&s, &c, 3).unwrap();
        assert_eq!(r.records.len(), 10);
        for (i, rec) in r.records.iter().enumerate() {
            assert_eq!(rec.point.index, i);
            assert_eq!(rec.point.coords, vec![i / 5, i % 5]);
        }
        // the ends 0 and 2π both rotate by 0 but are not adjacent, so no plateau
        assert!(r.records.iter().all(|x| r.scalar(x.point.index, "plateau") == Some(0.0)));
        assert!((r.scalar(2, "rotation").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn worker_count_does_not_change_records() {
        let s = circle_spec(vec![Axis::linear("a", 0.0, 0.9, 3), Axis::linear("omega_tilde", 0.0, TAU, 8)]);
        let c = Config::default();
        let one = run_scan(&s, &c, 1).unwrap();
        let many = run_scan(&s, &c, 4).unwrap();
        assert_eq!(one.to_table().to_csv().unwrap(), many.to_table().to_csv().unwrap());
    }
}
