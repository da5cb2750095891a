//! Attractor classification from section topology and flow exponents, and
//! regime classification of voltage traces.

use super::integrator::{integrate_to, sample, IntegratorOptions};
use super::lyapunov::{flow_lyapunov, ExponentPattern, FlowLyapunov, FlowLyapunovOptions, ZERO_EXPONENT_TOL};
use super::fast::slow_nullcline_position;
use super::model::{standard_seed, BursterParams, BursterState};
use super::section::{default_section, poincare_section, SectionOptions};
use super::BursterError;
use serde::{Deserialize, Serialize};

/// Minimum number of section points for topology analysis.
pub const MIN_SECTION_POINTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorLabel {
    Equilibrium,
    PeriodicOrbit,
    QuasiperiodicTorus,
    Chaotic,
    Unclassified,
}

impl AttractorLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            AttractorLabel::Equilibrium => "equilibrium",
            AttractorLabel::PeriodicOrbit => "periodic_orbit",
            AttractorLabel::QuasiperiodicTorus => "quasiperiodic_torus",
            AttractorLabel::Chaotic => "chaotic",
            AttractorLabel::Unclassified => "unclassified",
        }
    }
}

impl std::fmt::Display for AttractorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorOptions {
    /// Maximum cluster radius for a periodic orbit.
    pub cluster_tol: f64,
    /// Largest allowed gap between angle-ordered neighbours, as a fraction of the curve length.
    pub gap_tol: f64,
    /// A closed curve must be at most this many times longer than its convex hull perimeter.
    pub length_ratio: f64,
    /// Curves must span at least this many cluster tolerances.
    pub min_curve_extent: f64,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-5,
            gap_tol: 0.05,
            length_ratio: 1.5,
            min_curve_extent: 100.0,
        }
    }
}

/// What the section points alone say.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionTopology {
    Empty,
    TooFewPoints { count: usize },
    Clusters { centers: Vec<[f64; 2]>, radii: Vec<f64> },
    ClosedCurves { curves: Vec<CurveStats> },
    Irregular { clusters: usize, max_radius: f64, curves: Vec<CurveStats> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveStats {
    pub points: usize,
    pub length: f64,
    pub max_gap: f64,
    pub hull_perimeter: f64,
    pub extent: f64,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorReport {
    pub label: AttractorLabel,
    pub topology: SectionTopology,
    pub exponents: Option<[f64; 3]>,
    pub pattern: Option<ExponentPattern>,
}

/// Leader clustering: each point joins the first cluster whose leader lies
/// within `join`, otherwise starts a new one.
fn leader_clusters(points: &[[f64; 2]], join: f64, max_clusters: usize) -> Option<Vec<Vec<usize>>> {
    let mut leaders: Vec<[f64; 2]> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match leaders.iter().position(|l| dist(*l, *p) <= join) {
            Some(k) => members[k].push(i),
            None => {
                if leaders.len() == max_clusters {
                    return None;
                }
                leaders.push(*p);
                members.push(vec![i]);
            }
        }
    }
    Some(members)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn centroid(points: &[[f64; 2]]) -> [f64; 2] {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
    [sx / n, sy / n]
}

/// Andrew's monotone chain.
fn hull_perimeter(points: &[[f64; 2]]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return 2.0 * pts.first().zip(pts.last()).map_or(0.0, |(a, b)| dist(*a, *b));
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    (0..hull.len()).map(|i| dist(hull[i], hull[(i + 1) % hull.len()])).sum()
}

/// Orders points by angle around their centroid and measures the polygon.
pub fn curve_stats(points: &[[f64; 2]], o: &AttractorOptions) -> CurveStats {
    let c = centroid(points);
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
    let n = sorted.len();
    let mut length = 0.0;
    let mut max_gap: f64 = 0.0;
    for i in 0..n {
        let d = dist(sorted[i], sorted[(i + 1) % n]);
        length += d;
        max_gap = max_gap.max(d);
    }
    let hull = hull_perimeter(&sorted);
    let extent = sorted.iter().map(|p| dist(*p, c)).fold(0.0, f64::max);
    let closed = n >= 3
        && extent > o.min_curve_extent * o.cluster_tol
        && max_gap < o.gap_tol * length
        && length < o.length_ratio * hull;
    CurveStats {
        points: n,
        length,
        max_gap,
        hull_perimeter: hull,
        extent,
        closed,
    }
}

/// Topology of section points given as groups (one per crossing direction).
pub fn section_topology(groups: &[Vec<[f64; 2]>], o: &AttractorOptions) -> SectionTopology {
    let total: usize = groups.iter().map(Vec::len).sum();
    if total == 0 {
        return SectionTopology::Empty;
    }
    if total < MIN_SECTION_POINTS {
        return SectionTopology::TooFewPoints { count: total };
    }
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    let mut clustered = true;
    for g in groups {
        match leader_clusters(g, 2.0 * o.cluster_tol, (g.len() / 10).max(1)) {
            Some(members) => {
                for m in members {
                    let pts: Vec<[f64; 2]> = m.iter().map(|&i| g[i]).collect();
                    let c = centroid(&pts);
                    radii.push(pts.iter().map(|p| dist(*p, c)).fold(0.0, f64::max));
                    centers.push(c);
                }
            }
            None => clustered = false,
        }
    }
    let max_radius = radii.iter().copied().fold(0.0, f64::max);
    if clustered && max_radius < o.cluster_tol {
        return SectionTopology::Clusters { centers, radii };
    }
    let curves: Vec<CurveStats> = groups.iter().map(|g| curve_stats(g, o)).collect();
    if curves.iter().all(|c| c.closed) {
        SectionTopology::ClosedCurves { curves }
    } else {
        SectionTopology::Irregular {
            clusters: if clustered { centers.len() } else { 0 },
            max_radius,
            curves,
        }
    }
}

/// Combines section topology with optional flow exponents. With exponents,
/// periodic and torus labels need both sources to agree; without them the
/// section alone decides and chaos cannot be reported.
pub fn classify_attractor(groups: &[Vec<[f64; 2]>], exponents: Option<&FlowLyapunov>, o: &AttractorOptions) -> AttractorReport {
    let topology = section_topology(groups, o);
    let pattern = exponents.map(FlowLyapunov::pattern);
    let agrees = |want: ExponentPattern| exponents.is_none_or(|e| e.matches(want));
    let label = match &topology {
        // slow exponents of an equilibrium are O(mu_slow) and may sit inside the zero band
        SectionTopology::Empty if !exponents.is_some_and(|e| e.matches(ExponentPattern::Chaotic)) => AttractorLabel::Equilibrium,
        SectionTopology::Clusters { .. } if agrees(ExponentPattern::Periodic) => AttractorLabel::PeriodicOrbit,
        SectionTopology::ClosedCurves { .. } if agrees(ExponentPattern::Torus) => AttractorLabel::QuasiperiodicTorus,
        SectionTopology::Irregular { .. } if exponents.is_some_and(|e| e.matches(ExponentPattern::Chaotic)) => AttractorLabel::Chaotic,
        _ => AttractorLabel::Unclassified,
    };
    AttractorReport {
        label,
        topology,
        exponents: exponents.map(|e| e.exponents),
        pattern,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    Quiescent,
    TonicSpiking,
    Bursting,
    QuasiperiodicTorus,
    Chaotic,
    Unclassified,
}

impl RegimeLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeLabel::Quiescent => "quiescent",
            RegimeLabel::TonicSpiking => "tonic_spiking",
            RegimeLabel::Bursting => "bursting",
            RegimeLabel::QuasiperiodicTorus => "quasiperiodic_torus",
            RegimeLabel::Chaotic => "chaotic",
            RegimeLabel::Unclassified => "unclassified",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeOptions {
    pub t_transient: f64,
    /// Length of the analysed window after the transient.
    pub t_max: f64,
    pub sample_dt: f64,
    pub spike_threshold: f64,
    /// `v` must fall this far below the threshold before the next spike counts.
    pub prominence: f64,
    pub gap_factor: f64,
    pub cv_tol: f64,
    pub min_spikes: usize,
    /// Spikeless windows ending within this distance of an unstable
    /// equilibrium are extended up to `max_extensions` times.
    pub stuck_radius: f64,
    pub max_extensions: usize,
    /// Run section and exponent analysis for non-bursting traces.
    pub attractor_analysis: bool,
    pub section: SectionOptions,
    pub lyapunov: FlowLyapunovOptions,
    pub attractor: AttractorOptions,
    pub integrator: IntegratorOptions,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        Self {
            t_transient: 5e3,
            t_max: 2e4,
            sample_dt: 0.05,
            spike_threshold: 0.0,
            prominence: 0.5,
            gap_factor: 5.0,
            cv_tol: 0.05,
            min_spikes: 20,
            stuck_radius: 1e-2,
            max_extensions: 10,
            attractor_analysis: true,
            section: SectionOptions::default(),
            lyapunov: FlowLyapunovOptions::default(),
            attractor: AttractorOptions::default(),
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeStats {
    pub count: usize,
    pub mean_isi: f64,
    pub median_isi: f64,
    pub isi_cv: f64,
    /// Interspike intervals longer than `gap_factor` times the median or
    /// containing a subthreshold oscillation.
    pub gaps: usize,
    pub subthreshold_maxima: usize,
    /// Mean spikes per burst when gaps exist.
    pub spikes_per_burst: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    pub c: f64,
    pub spikes: SpikeStats,
    pub attractor: Option<AttractorReport>,
    pub final_state: BursterState,
    /// Extra `t_max` windows spent waiting to leave an unstable equilibrium.
    pub extensions: usize,
}

/// Upward threshold crossings (linearly interpolated times) with hysteresis.
pub fn detect_spikes(t: &[f64], v: &[f64], threshold: f64, prominence: f64) -> Vec<f64> {
    let mut armed = v.first().is_some_and(|&v0| v0 < threshold - prominence);
    let mut out = Vec::new();
    for i in 1..v.len() {
        if v[i] < threshold - prominence {
            armed = true;
        }
        if armed && v[i - 1] < threshold && v[i] >= threshold {
            let s = (threshold - v[i - 1]) / (v[i] - v[i - 1]);
            out.push(t[i - 1] + s * (t[i] - t[i - 1]));
            armed = false;
        }
    }
    out
}

/// Times of local maxima of `v` that stay below `threshold`.
pub fn subthreshold_maxima(t: &[f64], v: &[f64], threshold: f64) -> Vec<f64> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] < threshold && v[i] > v[i - 1] && v[i] >= v[i + 1])
        .map(|i| t[i])
        .collect()
}

/// Interspike statistics; `quiet_maxima` are subthreshold peak times.
pub fn spike_stats(times: &[f64], gap_factor: f64, quiet_maxima: &[f64]) -> SpikeStats {
    let isi: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    if isi.is_empty() {
        return SpikeStats {
            count: times.len(),
            mean_isi: f64::NAN,
            median_isi: f64::NAN,
            isi_cv: f64::NAN,
            gaps: 0,
            subthreshold_maxima: quiet_maxima.len(),
            spikes_per_burst: f64::NAN,
        };
    }
    let n = isi.len() as f64;
    let mean = isi.iter().sum::<f64>() / n;
    let var = isi.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mut sorted = isi.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 { sorted[m / 2] } else { 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]) };
    let gaps = times
        .windows(2)
        .filter(|w| {
            let quiet = quiet_maxima.partition_point(|&q| q <= w[0]) < quiet_maxima.partition_point(|&q| q < w[1]);
            w[1] - w[0] > gap_factor * median || quiet
        })
        .count();
    SpikeStats {
        count: times.len(),
        mean_isi: mean,
        median_isi: median,
        isi_cv: var.sqrt() / mean,
        gaps,
        subthreshold_maxima: quiet_maxima.len(),
        spikes_per_burst: if gaps > 0 { times.len() as f64 / gaps as f64 } else { f64::NAN },
    }
}

/// Runs the section and exponent diagnostics from `start`.
pub fn analyse_attractor(start: BursterState, p: &BursterParams, o: &RegimeOptions) -> Result<AttractorReport, BursterError> {
    let groups = match poincare_section(start, p, default_section(p), &o.section) {
        Ok(r) => r.groups(),
        Err(BursterError::InsufficientData(_)) => Vec::new(),
        Err(e) => return Err(e),
    };
    let lyap = flow_lyapunov(
        start,
        p,
        &FlowLyapunovOptions {
            t_transient: 0.0,
            ..o.lyapunov
        },
    )?;
    Ok(classify_attractor(&groups, Some(&lyap), &o.attractor))
}

/// Integrates from the standard seed and labels the regime.
pub fn classify_regime(p: &BursterParams, o: &RegimeOptions) -> Result<RegimeReport, BursterError> {
    if !(o.t_max > 0.0) || !(o.sample_dt > 0.0) || o.t_transient < 0.0 {
        return Err(BursterError::invalid("t_max", "t_max and sample_dt must be positive".into()));
    }
    let seed = standard_seed(p).to_array();
    let mut start = if o.t_transient > 0.0 {
        integrate_to(p, 0.0, seed, o.t_transient, o.integrator)?
    } else {
        seed
    };
    let report = slow_nullcline_position(p);
    let eq = report.equilibrium.to_array();
    let eq_unstable = report.eigenvalues.iter().any(|e| e.0 > 0.0);
    let mut extensions = 0;
    let (traj, stats, stuck) = loop {
        let traj = sample(p, 0.0, start, o.t_max, o.sample_dt, o.integrator)?;
        let v: Vec<f64> = traj.y.iter().map(|s| s[0]).collect();
        let times = detect_spikes(&traj.t, &v, o.spike_threshold, o.prominence);
        let quiet = subthreshold_maxima(&traj.t, &v, o.spike_threshold);
        let stats = spike_stats(&times, o.gap_factor, &quiet);
        let end = *traj.y.last().unwrap_or(&start);
        let near_eq = (0..3).map(|i| (end[i] - eq[i]).powi(2)).sum::<f64>().sqrt() < o.stuck_radius;
        // slow passage past the tip leaves orbits exponentially close to an unstable equilibrium
        let stuck = stats.count == 0 && eq_unstable && near_eq;
        if !stuck || extensions == o.max_extensions {
            break (traj, stats, stuck);
        }
        extensions += 1;
        start = end;
    };
    let final_state = BursterState::from_array(*traj.y.last().unwrap_or(&start));
    if stuck {
        return Ok(RegimeReport {
            label: RegimeLabel::Unclassified,
            c: p.c,
            spikes: stats,
            attractor: None,
            final_state,
            extensions,
        });
    }
    if stats.count > 0 && stats.count < o.min_spikes {
        return Err(BursterError::InsufficientData(format!(
            "{} spikes in t_max = {}; at least {} needed",
            stats.count, o.t_max, o.min_spikes
        )));
    }
    let attractor = if o.attractor_analysis && stats.gaps == 0 {
        Some(analyse_attractor(final_state, p, o)?)
    } else {
        None
    };
    let from_attractor = attractor.as_ref().map(|a| a.label);
    let label = if stats.count == 0 {
        match from_attractor {
            Some(AttractorLabel::QuasiperiodicTorus) => RegimeLabel::QuasiperiodicTorus,
            Some(AttractorLabel::Chaotic) => RegimeLabel::Chaotic,
            _ => RegimeLabel::Quiescent,
        }
    } else if stats.gaps > 0 {
        RegimeLabel::Bursting
    } else {
        match from_attractor {
            Some(AttractorLabel::QuasiperiodicTorus) => RegimeLabel::QuasiperiodicTorus,
            Some(AttractorLabel::Chaotic) => RegimeLabel::Chaotic,
            _ if stats.isi_cv < o.cv_tol => RegimeLabel::TonicSpiking,
            _ => RegimeLabel::Unclassified,
        }
    };
    Ok(RegimeReport {
        label,
        c: p.c,
        spikes: stats,
        attractor,
        final_state,
        extensions,
    })
}

/// Exponents within [`ZERO_EXPONENT_TOL`] of zero.
pub fn zero_exponents(e: &[f64; 3]) -> usize {
    e.iter().filter(|x| x.abs() < ZERO_EXPONENT_TOL).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lyap(e: [f64; 3]) -> FlowLyapunov {
        FlowLyapunov {
            exponents: e,
            mean_divergence: e.iter().sum(),
            time: 1e4,
            final_state: BursterState::new(0.0, 0.0, 0.0),
        }
    }

    fn circle_orbit(n: usize, theta: f64, r: f64, center: [f64; 2]) -> Vec<[f64; 2]> {
        (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 * theta;
                [center[0] + r * a.cos(), center[1] + r * a.sin()]
            })
            .collect()
    }

    #[test]
    fn irrational_rotation_is_a_torus() {
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let groups = vec![circle_orbit(600, theta, 0.3, [0.0, 0.0]), circle_orbit(600, theta, 0.1, [2.0, 1.0])];
        let o = AttractorOptions::default();
        let r = classify_attractor(&groups, None, &o);
        assert_eq!(r.label, AttractorLabel::QuasiperiodicTorus);
        let r = classify_attractor(&groups, Some(&lyap([0.001, -0.003, -0.5])), &o);
        assert_eq!(r.label, AttractorLabel::QuasiperiodicTorus);
        // disagreement is never forced
        let r = classify_attractor(&groups, Some(&lyap([0.001, -0.3, -0.5])), &o);
        assert_eq!(r.label, AttractorLabel::Unclassified);
    }

    #[test]
    fn period_three_gives_three_clusters() {
        let pts = circle_orbit(900, 1.0 / 3.0, 0.5, [1.0, -1.0]);
        let o = AttractorOptions::default();
        let r = classify_attractor(&[pts], Some(&lyap([0.0005, -0.2, -0.9])), &o);
        assert_eq!(r.label, AttractorLabel::PeriodicOrbit);
        match r.topology {
            SectionTopology::Clusters { centers, radii } => {
                assert_eq!(centers.len(), 3);
                assert!(radii.iter().all(|&x| x < 1e-12));
            }
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn random_cloud_is_not_a_curve() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 2]> = (0..800).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        let o = AttractorOptions::default();
        assert!(matches!(section_topology(&[pts.clone()], &o), SectionTopology::Irregular { .. }));
        assert_eq!(classify_attractor(&[pts.clone()], None, &o).label, AttractorLabel::Unclassified);
        assert_eq!(classify_attractor(&[pts], Some(&lyap([0.05, 0.0, -1.0])), &o).label, AttractorLabel::Chaotic);
    }

    #[test]
    fn empty_section_is_an_equilibrium() {
        let o = AttractorOptions::default();
        assert_eq!(classify_attractor(&[], None, &o).label, AttractorLabel::Equilibrium);
        assert_eq!(classify_attractor(&[vec![[0.0, 0.0]; 20]], None, &o).label, AttractorLabel::Unclassified);
    }

    #[test]
    fn hull_of_square() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.2, 0.7]];
        assert!((hull_perimeter(&pts) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn spikes_with_hysteresis() {
        let t: Vec<f64> = (0..10000).map(|i| i as f64 * 0.01).collect();
        // a sine with period 10 and small ripples near the threshold
        let v: Vec<f64> = t.iter().map(|&x| (std::f64::consts::TAU * x / 10.0).sin() * 2.0 + 0.01 * (50.0 * x).sin()).collect();
        let s = detect_spikes(&t, &v, 0.0, 0.5);
        assert_eq!(s.len(), 9);
        let st = spike_stats(&s, 5.0, &[]);
        assert!((st.median_isi - 10.0).abs() < 0.05);
        assert!(st.isi_cv < 0.01);
        assert_eq!(st.gaps, 0);
    }

    #[test]
    fn burst_gaps_are_counted() {
        let mut s = Vec::new();
        for b in 0..5 {
            for k in 0..6 {
                s.push(b as f64 * 200.0 + k as f64 * 10.0);
            }
        }
        let st = spike_stats(&s, 5.0, &[]);
        assert_eq!(st.gaps, 4);
        assert!((st.spikes_per_burst - 7.5).abs() < 1e-12);
        // one spike per cycle with small oscillations in between
        let s: Vec<f64> = (0..10).map(|k| k as f64 * 40.0).collect();
        let quiet: Vec<f64> = (0..10).map(|k| k as f64 * 40.0 + 20.0).collect();
        assert_eq!(spike_stats(&s, 5.0, &quiet).gaps, 9);
        assert_eq!(spike_stats(&s, 5.0, &[]).gaps, 0);
    }

    #[test]
    fn quiescent_far_from_the_tip() {
        let p = BursterParams::with_c(-1.6);
        let o = RegimeOptions {
            t_max: 5e3,
            ..RegimeOptions::default()
        };
        let r = classify_regime(&p, &o).unwrap();
        assert_eq!(r.label, RegimeLabel::Quiescent);
        assert_eq!(r.spikes.count, 0);
    }
}
