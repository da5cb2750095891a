//! The fast subsystem at frozen `y`: equilibria, the Andronov-Hopf point and
//! the full-system equilibrium cut out by the slow nullcline `v = c - y`.

use super::integrator::{Dop853, IntegratorOptions, OdeSystem};
use super::model::{jacobian, rhs, BursterParams, BursterState, W_GAIN, W_OFFSET};
use super::BursterError;
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

/// Fast `(v, w)` equations with the slow input `J = y + I` frozen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastSystem {
    pub delta: f64,
    pub drive: f64,
}

impl FastSystem {
    pub fn new(y_frozen: f64, p: &BursterParams) -> Self {
        Self {
            delta: p.delta,
            drive: y_frozen + p.drive,
        }
    }
}

impl OdeSystem<2> for FastSystem {
    fn rhs(&self, _t: f64, x: &[f64; 2], dx: &mut [f64; 2]) {
        dx[0] = x[0] - x[0] * x[0] * x[0] / 3.0 - x[1] + self.drive;
        dx[1] = self.delta * (W_OFFSET + x[0] - W_GAIN * x[1]);
    }
}

/// Position on the cubic `v`-nullcline `w = v - v^3/3 + J`, split at its knees `v = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicBranch {
    Lower,
    Middle,
    Upper,
}

impl CubicBranch {
    fn of(v: f64) -> Self {
        if v < -1.0 {
            CubicBranch::Lower
        } else if v > 1.0 {
            CubicBranch::Upper
        } else {
            CubicBranch::Middle
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FastEquilibrium {
    pub v: f64,
    pub w: f64,
    /// `(re, im)` pairs of the 2x2 fast Jacobian.
    pub eigenvalues: [(f64, f64); 2],
    pub stable: bool,
    pub branch: CubicBranch,
}

fn fast_eigenvalues(v: f64, delta: f64) -> [(f64, f64); 2] {
    let tr = 1.0 - v * v - W_GAIN * delta;
    let det = delta * (1.0 - W_GAIN * (1.0 - v * v));
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        [(tr / 2.0 + s, 0.0), (tr / 2.0 - s, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [(tr / 2.0, s), (tr / 2.0, -s)]
    }
}

/// Real roots of `v^3 + a v + b = 0` in increasing order.
fn depressed_cubic_roots(a: f64, b: f64) -> Vec<f64> {
    let disc = (b / 2.0).powi(2) + (a / 3.0).powi(3);
    let mut roots = if disc > 0.0 {
        let s = disc.sqrt();
        vec![(-b / 2.0 + s).cbrt() + (-b / 2.0 - s).cbrt()]
    } else if a == 0.0 {
        vec![0.0]
    } else {
        let r = 2.0 * (-a / 3.0).sqrt();
        let arg = (3.0 * b / (a * r)).clamp(-1.0, 1.0);
        let th = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (th - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    let f = |v: f64| v * v * v + a * v + b;
    for r in roots.iter_mut() {
        // Newton polish, then bisection guard on a small bracket
        for _ in 0..4 {
            let d = 3.0 * *r * *r + a;
            if d != 0.0 {
                *r -= f(*r) / d;
            }
        }
        let h = 1e-9 * r.abs().max(1.0);
        let (lo, hi) = (*r - h, *r + h);
        if f(lo) * f(hi) < 0.0 {
            *r = crate::maps::bisect(f, lo, hi);
        }
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    roots
}

/// Coefficients of the equilibrium cubic `v^3 + a v + b = 0` at drive `J`,
/// obtained from `v - v^3/3 - w + J = 0` with `w = (0.7 + v)/0.8`.
fn equilibrium_cubic(j: f64) -> (f64, f64) {
    (3.0 * (1.0 / W_GAIN - 1.0), 3.0 * W_OFFSET / W_GAIN - 3.0 * j)
}

/// All equilibria of the fast subsystem at `y = y_frozen`.
pub fn fast_equilibria(y_frozen: f64, p: &BursterParams) -> Vec<FastEquilibrium> {
    let (a, b) = equilibrium_cubic(y_frozen + p.drive);
    depressed_cubic_roots(a, b)
        .into_iter()
        .map(|v| {
            let eigenvalues = fast_eigenvalues(v, p.delta);
            FastEquilibrium {
                v,
                w: (W_OFFSET + v) / W_GAIN,
                eigenvalues,
                stable: eigenvalues.iter().all(|e| e.0 < 0.0),
                branch: CubicBranch::of(v),
            }
        })
        .collect()
}

/// The fast equilibrium with the smallest `v` (the only one for the
/// recovery constants 0.7/0.8, whose cubic is monotone).
pub fn fast_equilibrium(y_frozen: f64, p: &BursterParams) -> FastEquilibrium {
    fast_equilibria(y_frozen, p)[0]
}

/// Residual of the fast equilibrium equations.
pub fn fast_residual(v: f64, w: f64, y_frozen: f64, p: &BursterParams) -> f64 {
    let f = rhs(BursterState::new(v, w, y_frozen), p);
    f[0].abs().max((f[1] / p.delta).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criticality {
    Subcritical,
    Supercritical,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalityProbe {
    /// Offset in `y` from the Hopf point used by the probes.
    pub offset: f64,
    /// A small cycle traps backward orbits on the stable side.
    pub unstable_cycle_before: bool,
    /// A small cycle traps forward orbits on the unstable side.
    pub stable_cycle_after: bool,
    /// `1 - (largest excursion of the trapped probe) / (trapping radius)`.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhPoint {
    pub y_ah: f64,
    pub v_ah: f64,
    pub w_ah: f64,
    /// `sqrt(det)` of the fast Jacobian.
    pub frequency: f64,
    pub criticality: Criticality,
    pub probe: CriticalityProbe,
}

const TRAP_RADIUS: f64 = 0.3;
const PROBE_KICK: f64 = 1e-4;
/// Probe duration in units of the e-folding time `1/|Re lambda|`.
const PROBE_EFOLDS: f64 = 15.0;

/// Largest distance from `center` reached within `t_max`; `None` on escape
/// beyond `radius` or blow-up.
fn trapped(sys: &FastSystem, center: [f64; 2], t_max: f64, radius: f64) -> Option<f64> {
    let start = [center[0] + PROBE_KICK, center[1]];
    let opts = IntegratorOptions {
        divergence_bound: 50.0,
        ..IntegratorOptions::with_tolerances(1e-10, 1e-12)
    };
    let mut it = Dop853::new(sys, 0.0, start, t_max, opts).ok()?;
    let mut worst: f64 = 0.0;
    loop {
        match it.step() {
            Ok(true) => {
                let y = it.y();
                let d = (y[0] - center[0]).hypot(y[1] - center[1]);
                if d > radius {
                    return None;
                }
                worst = worst.max(d);
            }
            Ok(false) => return Some(worst),
            Err(_) => return None,
        }
    }
}

fn probe_criticality(p: &BursterParams, y_ah: f64) -> (Criticality, CriticalityProbe) {
    let mut last = CriticalityProbe {
        offset: 0.0,
        unstable_cycle_before: false,
        stable_cycle_after: false,
        margin: 0.0,
    };
    for offset in [3e-2, 1e-2, 3e-3, 1e-3] {
        let before = y_ah - offset;
        let after = y_ah + offset;
        let eb = fast_equilibrium(before, p);
        let ea = fast_equilibrium(after, p);
        let tb = PROBE_EFOLDS / eb.eigenvalues[0].0.abs();
        let ta = PROBE_EFOLDS / ea.eigenvalues[0].0.abs();
        let back = trapped(&FastSystem::new(before, p), [eb.v, eb.w], -tb, TRAP_RADIUS);
        let fwd = trapped(&FastSystem::new(after, p), [ea.v, ea.w], ta, TRAP_RADIUS);
        last = CriticalityProbe {
            offset,
            unstable_cycle_before: back.is_some(),
            stable_cycle_after: fwd.is_some(),
            margin: back.or(fwd).map_or(0.0, |d| 1.0 - d / TRAP_RADIUS),
        };
        match (back, fwd) {
            (Some(_), None) => return (Criticality::Subcritical, last),
            (None, Some(_)) => return (Criticality::Supercritical, last),
            _ => {}
        }
    }
    (Criticality::Undetermined, last)
}

/// Andronov-Hopf point of the fast subsystem on the lower branch: the trace
/// `1 - v^2 - 0.8 delta` vanishes at `v_AH = -sqrt(1 - 0.8 delta)`.
/// Criticality is decided by small-cycle probes on both sides.
pub fn fast_ah_point(p: &BursterParams) -> Result<AhPoint, BursterError> {
    let s = 1.0 - W_GAIN * p.delta;
    if s <= 0.0 {
        return Err(BursterError::invalid(
            "delta",
            format!("no Andronov-Hopf point for delta = {} >= 1.25", p.delta),
        ));
    }
    let v = -s.sqrt();
    let w = (W_OFFSET + v) / W_GAIN;
    // v - v^3/3 - w + J = 0
    let j = w - v + v * v * v / 3.0;
    let y_ah = j - p.drive;
    let det = p.delta * (1.0 - W_GAIN * (1.0 - v * v));
    let frequency = det.sqrt();
    let (criticality, probe) = probe_criticality(p, y_ah);
    Ok(AhPoint {
        y_ah,
        v_ah: v,
        w_ah: w,
        frequency,
        criticality,
        probe,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TipSide {
    /// `v` below the Hopf value on the lower branch.
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    StableFocus,
    StableNode,
    SaddleFocus,
    Saddle,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullclineReport {
    pub equilibrium: BursterState,
    pub eigenvalues: [(f64, f64); 3],
    pub residual: f64,
    /// Value of `c` placing the equilibrium on the Hopf point.
    pub c_tip: f64,
    pub side: TipSide,
    pub kind: EquilibriumKind,
}

/// Eigenvalues of a real 3x3 matrix sorted by decreasing real part.
pub fn eigenvalues3(m: [[f64; 3]; 3]) -> [(f64, f64); 3] {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let ev = mat.complex_eigenvalues();
    let mut out = [(ev[0].re, ev[0].im), (ev[1].re, ev[1].im), (ev[2].re, ev[2].im)];
    out.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    out
}

/// Full-system equilibrium on the slow nullcline `v = c - y` and its type.
pub fn slow_nullcline_position(p: &BursterParams) -> NullclineReport {
    // v^3 + 0.75 v + 2.625 - 3 (c - v + I) = 0
    let (a, b) = equilibrium_cubic(p.c + p.drive);
    let v = depressed_cubic_roots(a + 3.0, b)[0];
    let eq = BursterState::new(v, (W_OFFSET + v) / W_GAIN, p.c - v);
    let f = rhs(eq, p);
    let residual = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let eigenvalues = eigenvalues3(jacobian(eq, p));
    let v_ah = -(1.0 - W_GAIN * p.delta).max(0.0).sqrt();
    let w_ah = (W_OFFSET + v_ah) / W_GAIN;
    let y_ah = w_ah - v_ah + v_ah.powi(3) / 3.0 - p.drive;
    let unstable = eigenvalues.iter().filter(|e| e.0 > 0.0).count();
    let complex = eigenvalues.iter().any(|e| e.1 != 0.0);
    let kind = match (unstable, complex) {
        (0, true) => EquilibriumKind::StableFocus,
        (0, false) => EquilibriumKind::StableNode,
        (1 | 2, true) => EquilibriumKind::SaddleFocus,
        (1 | 2, false) => EquilibriumKind::Saddle,
        _ => EquilibriumKind::Unstable,
    };
    NullclineReport {
        equilibrium: eq,
        eigenvalues,
        residual,
        c_tip: v_ah + y_ah,
        side: if v < v_ah { TipSide::Left } else { TipSide::Right },
        kind,
    }
}
