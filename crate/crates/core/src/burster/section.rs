//! Poincaré sections by event location on the dense output.

use super::fast::slow_nullcline_position;
use super::integrator::{Dop853, IntegrationError, IntegratorOptions, OdeSystem};
use super::model::{BursterParams, BursterState};
use super::BursterError;
use serde::{Deserialize, Serialize};

/// Time tolerance of crossing refinement.
pub const EVENT_TOL: f64 = 1e-12;
pub const DEFAULT_DISCARD: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossingDirection {
    Increasing,
    Decreasing,
    Both,
}

impl CrossingDirection {
    fn accepts(self, before: f64, after: f64) -> Option<bool> {
        let up = before < 0.0 && after >= 0.0;
        let down = before > 0.0 && after <= 0.0;
        match self {
            CrossingDirection::Increasing if up => Some(true),
            CrossingDirection::Decreasing if down => Some(false),
            CrossingDirection::Both if up || down => Some(up),
            _ => None,
        }
    }
}

/// The plane `normal · (v, w, y) = offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionPlane {
    pub normal: [f64; 3],
    pub offset: f64,
    pub direction: CrossingDirection,
}

impl SectionPlane {
    pub fn w_plane(w_ref: f64, direction: CrossingDirection) -> Self {
        Self {
            normal: [0.0, 1.0, 0.0],
            offset: w_ref,
            direction,
        }
    }

    pub fn value(&self, x: &[f64; 3]) -> f64 {
        self.normal[0] * x[0] + self.normal[1] * x[1] + self.normal[2] * x[2] - self.offset
    }

    /// Indices of the two coordinates kept when points are drawn in the plane.
    pub fn in_plane_axes(&self) -> (usize, usize) {
        let k = (0..3)
            .max_by(|&a, &b| self.normal[a].abs().total_cmp(&self.normal[b].abs()))
            .unwrap_or(1);
        match k {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        }
    }
}

/// `w = w_ref` through the full-system equilibrium, crossed in both directions.
pub fn default_section(p: &BursterParams) -> SectionPlane {
    SectionPlane::w_plane(slow_nullcline_position(p).equilibrium.w, CrossingDirection::Both)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub state: BursterState,
    /// Sign of the section functional's derivative at the crossing.
    pub increasing: bool,
}

/// Event-refined crossings of `g = 0` for a generic system. Stops at
/// `t_end` or after `max_crossings` events.
pub fn section_crossings<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    g: impl Fn(&[f64; N]) -> f64,
    direction: CrossingDirection,
    max_crossings: usize,
    opts: IntegratorOptions,
) -> Result<Vec<(f64, [f64; N], bool)>, IntegrationError> {
    let mut it = Dop853::new(sys, t0, y0, t_end, opts)?;
    let mut out = Vec::new();
    while out.len() < max_crossings && it.step()? {
        let (a, b) = (g(it.y_prev()), g(it.y()));
        if let Some(up) = direction.accepts(a, b) {
            let (t, y) = it.locate(&g, EVENT_TOL);
            out.push((t, y, up));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionOptions {
    pub discard: usize,
    /// Crossings kept after the transient.
    pub keep: usize,
    pub t_max: f64,
    /// Crossings closer than this to the full-system equilibrium are ignored.
    pub equilibrium_exclusion: f64,
    pub integrator: IntegratorOptions,
}

impl Default for SectionOptions {
    fn default() -> Self {
        Self {
            discard: DEFAULT_DISCARD,
            keep: 1000,
            t_max: 2e5,
            equilibrium_exclusion: 1e-6,
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionResult {
    pub plane: SectionPlane,
    pub crossings: Vec<Crossing>,
    pub discarded: usize,
    /// Integration end time.
    pub t_end: f64,
}

impl SectionResult {
    /// In-plane coordinates split by crossing direction (one group for
    /// one-sided sections).
    pub fn groups(&self) -> Vec<Vec<[f64; 2]>> {
        let (i, j) = self.plane.in_plane_axes();
        let mut up = Vec::new();
        let mut down = Vec::new();
        for c in &self.crossings {
            let s = c.state.to_array();
            if c.increasing {
                up.push([s[i], s[j]]);
            } else {
                down.push([s[i], s[j]]);
            }
        }
        [up, down].into_iter().filter(|g| !g.is_empty()).collect()
    }
}

/// Crossings of `plane` by the burster flow from `start`, with the first
/// `discard` removed. Fewer than 10 retained crossings is an error.
pub fn poincare_section(
    start: BursterState,
    p: &BursterParams,
    plane: SectionPlane,
    opts: &SectionOptions,
) -> Result<SectionResult, BursterError> {
    let eq = slow_nullcline_position(p).equilibrium.to_array();
    let g = |x: &[f64; 3]| plane.value(x);
    let mut it = Dop853::new(p, 0.0, start.to_array(), opts.t_max, opts.integrator)?;
    let mut raw = Vec::new();
    while raw.len() < opts.discard + opts.keep && it.step()? {
        if let Some(up) = plane.direction.accepts(g(it.y_prev()), g(it.y())) {
            let (t, y) = it.locate(g, EVENT_TOL);
            let d = (0..3).map(|i| (y[i] - eq[i]).powi(2)).sum::<f64>().sqrt();
            // a spiral settling onto the equilibrium keeps crossing a plane through it
            if d > opts.equilibrium_exclusion {
                raw.push((t, y, up));
            }
        }
    }
    let t_end = it.t();
    let discarded = raw.len().min(opts.discard);
    let crossings: Vec<Crossing> = raw
        .into_iter()
        .skip(opts.discard)
        .map(|(t, y, up)| Crossing {
            t,
            state: BursterState::from_array(y),
            increasing: up,
        })
        .collect();
    if crossings.len() < 10 {
        return Err(BursterError::InsufficientData(format!(
            "{} crossings after discarding {discarded}",
            crossings.len()
        )));
    }
    Ok(SectionResult {
        plane,
        crossings,
        discarded,
        t_end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rotation in the (x1, x2) plane at unit speed with a drifting third coordinate.
    struct Circle;
    impl OdeSystem<3> for Circle {
        fn rhs(&self, _t: f64, x: &[f64; 3], dx: &mut [f64; 3]) {
            dx[0] = -x[1];
            dx[1] = x[0];
            dx[2] = 0.1;
        }
    }

    #[test]
    fn synthetic_circle_crossings() {
        let plane = SectionPlane {
            normal: [1.0, 0.0, 0.0],
            offset: 0.5,
            direction: CrossingDirection::Both,
        };
        let opts = IntegratorOptions::with_tolerances(1e-13, 1e-15);
        let c = section_crossings(&Circle, 0.0, [1.0, 0.0, 0.0], 10.0 * std::f64::consts::TAU, |x| plane.value(x), plane.direction, 100, opts).unwrap();
        assert_eq!(c.len(), 20);
        let h = 0.75f64.sqrt();
        for (k, (t, x, up)) in c.iter().enumerate() {
            // x1 = cos t crosses 0.5 at t = π/3 + 2πn (down) and 5π/3 + 2πn (up)
            let n = (k / 2) as f64;
            let expect = if k % 2 == 0 { std::f64::consts::PI / 3.0 } else { 5.0 * std::f64::consts::PI / 3.0 } + std::f64::consts::TAU * n;
            assert!((t - expect).abs() < 1e-10, "{k}: {t} vs {expect}");
            assert!((x[0] - 0.5).abs() < 1e-10);
            assert!((x[1].abs() - h).abs() < 1e-10);
            assert_eq!(*up, k % 2 == 1);
        }
    }

    #[test]
    fn one_sided_sections() {
        let opts = IntegratorOptions::with_tolerances(1e-12, 1e-14);
        let up = section_crossings(&Circle, 0.0, [1.0, 0.0, 0.0], 20.0, |x| x[0], CrossingDirection::Increasing, 100, opts).unwrap();
        assert!(up.iter().all(|c| c.2 && c.1[1] < 0.0));
        let down = section_crossings(&Circle, 0.0, [1.0, 0.0, 0.0], 20.0, |x| x[0], CrossingDirection::Decreasing, 100, opts).unwrap();
        assert!(down.iter().all(|c| !c.2 && c.1[1] > 0.0));
    }

    #[test]
    fn quiescent_run_has_too_few_crossings() {
        let p = BursterParams::with_c(-1.6);
        let eq = slow_nullcline_position(&p).equilibrium;
        let start = BursterState::new(eq.v + 0.1, eq.w, eq.y);
        let opts = SectionOptions {
            t_max: 5000.0,
            ..SectionOptions::default()
        };
        let err = poincare_section(start, &p, default_section(&p), &opts).unwrap_err();
        assert!(matches!(err, BursterError::InsufficientData(_)));
    }
}
