//! Branches of the fast subsystem in the frozen slow variable: the
//! equilibrium branch and the limit-cycle branch, continued by multiple
//! shooting with pseudo-arclength steps around the fold.

use super::fast::{fast_ah_point, fast_equilibrium, FastEquilibrium};
use super::integrator::{Dop853, IntegratorOptions, OdeSystem};
use super::model::{BursterParams, W_GAIN, W_OFFSET};
use super::BursterError;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Equilibrium,
    LimitCycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    pub period: f64,
    /// Anchor point on the line `v = v_eq(y)` with `v` increasing.
    pub anchor: [f64; 2],
    /// `w_eq(y) - w` at the anchor.
    pub amplitude: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// Trivial multiplier (eigenvalue of the monodromy matrix closest to 1)
    /// followed by the nontrivial one `exp(∮ trace)`.
    pub multipliers: [f64; 2],
    /// Determinant of the monodromy matrix as the product of the segment
    /// determinants.
    pub monodromy_det: f64,
    /// `|x(T) - x(0)|`.
    pub closure: f64,
    pub states: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BranchObject {
    Equilibrium(FastEquilibrium),
    LimitCycle(LimitCycle),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSample {
    pub y: f64,
    pub arclength: f64,
    pub object: BranchObject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialKind {
    AndronovHopf,
    /// Saddle-node of limit cycles.
    Fold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub kind: SpecialKind,
    pub y: f64,
    pub v: f64,
    pub w: f64,
    /// Nontrivial multiplier at a fold, `NaN` otherwise.
    pub multiplier: f64,
    pub arclength: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastBranch {
    pub kind: BranchKind,
    /// Ordered by arclength; for equilibria this is also increasing `y`.
    pub samples: Vec<BranchSample>,
    pub special_points: Vec<SpecialPoint>,
}

impl FastBranch {
    pub fn fold(&self) -> Option<&SpecialPoint> {
        self.special_points.iter().find(|s| s.kind == SpecialKind::Fold)
    }

    pub fn hopf(&self) -> Option<&SpecialPoint> {
        self.special_points.iter().find(|s| s.kind == SpecialKind::AndronovHopf)
    }

    pub fn cycles(&self) -> impl Iterator<Item = (&BranchSample, &LimitCycle)> {
        self.samples.iter().filter_map(|s| match &s.object {
            BranchObject::LimitCycle(c) => Some((s, c)),
            BranchObject::Equilibrium(_) => None,
        })
    }
}

/// Equilibria on `steps` evenly spaced values of `y`, with the Hopf point
/// inserted where the fast trace changes sign.
pub fn fast_equilibrium_branch(y_range: (f64, f64), p: &BursterParams, steps: usize) -> Result<FastBranch, BursterError> {
    let (lo, hi) = y_range;
    if !(hi > lo) || steps < 2 {
        return Err(BursterError::invalid("y_range", format!("need lo < hi and steps >= 2, got ({lo}, {hi}), {steps}")));
    }
    let samples: Vec<_> = (0..steps)
        .map(|i| {
            let y = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            BranchSample {
                y,
                arclength: y - lo,
                object: BranchObject::Equilibrium(fast_equilibrium(y, p)),
            }
        })
        .collect();
    let mut special_points = Vec::new();
    if let Ok(ah) = fast_ah_point(p) {
        if ah.y_ah > lo && ah.y_ah < hi {
            special_points.push(SpecialPoint {
                kind: SpecialKind::AndronovHopf,
                y: ah.y_ah,
                v: ah.v_ah,
                w: ah.w_ah,
                multiplier: f64::NAN,
                arclength: ah.y_ah - lo,
            });
        }
    }
    Ok(FastBranch {
        kind: BranchKind::Equilibrium,
        samples,
        special_points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    /// Stop when the cycle amplitude falls below this value.
    pub amplitude_min: f64,
    pub newton_tol: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Number of multiple-shooting segments.
    pub segments: usize,
    pub states_per_cycle: usize,
    /// Steps are rejected when the nontrivial multiplier, or its logarithm,
    /// changes by more than these bounds.
    pub max_multiplier_jump: f64,
    pub max_log_multiplier_jump: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            ds: 0.02,
            ds_min: 1e-9,
            ds_max: 0.2,
            amplitude_min: 2e-3,
            newton_tol: 1e-10,
            rtol: 1e-12,
            atol: 1e-14,
            segments: 40,
            states_per_cycle: 80,
            max_multiplier_jump: 0.1,
            max_log_multiplier_jump: 0.1,
        }
    }
}

/// Fast flow with its state transition matrix, sensitivity to `y` and
/// integrated trace.
struct Variational {
    delta: f64,
    drive: f64,
}

impl OdeSystem<9> for Variational {
    fn rhs(&self, _t: f64, x: &[f64; 9], dx: &mut [f64; 9]) {
        let (v, w) = (x[0], x[1]);
        dx[0] = v - v * v * v / 3.0 - w + self.drive;
        dx[1] = self.delta * (W_OFFSET + v - W_GAIN * w);
        let a = [[1.0 - v * v, -1.0], [self.delta, -W_GAIN * self.delta]];
        // M row-major in x[2..6]
        for r in 0..2 {
            for c in 0..2 {
                dx[2 + 2 * r + c] = a[r][0] * x[2 + c] + a[r][1] * x[4 + c];
            }
        }
        dx[6] = a[0][0] * x[6] + a[0][1] * x[7] + 1.0;
        dx[7] = a[1][0] * x[6] + a[1][1] * x[7];
        dx[8] = a[0][0] + a[1][1];
    }
}

struct Segment {
    end: [f64; 2],
    m: [[f64; 2]; 2],
    s: [f64; 2],
    f_end: [f64; 2],
    trace: f64,
}

fn flow_segment(x: [f64; 2], dt: f64, y: f64, p: &BursterParams, o: &ContinuationOptions) -> Result<Segment, BursterError> {
    let sys = Variational {
        delta: p.delta,
        drive: y + p.drive,
    };
    let opts = IntegratorOptions {
        divergence_bound: 1e12,
        ..IntegratorOptions::with_tolerances(o.rtol, o.atol)
    };
    let mut it = Dop853::new(&sys, 0.0, [x[0], x[1], 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], dt, opts)?;
    while it.step()? {}
    let e = *it.y();
    let f = *it.dydt();
    Ok(Segment {
        end: [e[0], e[1]],
        m: [[e[2], e[3]], [e[4], e[5]]],
        s: [e[6], e[7]],
        f_end: [f[0], f[1]],
        trace: e[8],
    })
}

fn v_eq_and_slope(y: f64, p: &BursterParams) -> (f64, f64, f64) {
    let e = fast_equilibrium(y, p);
    (e.v, e.w, 3.0 / (3.0 * e.v * e.v + 3.0 * (1.0 / W_GAIN - 1.0)))
}

/// Unknowns are `[x_1, ..., x_K, T, y]`; the arclength metric weighs the
/// cycle points by `1/sqrt(K)`, the period by 0.05 and `y` by 1.
fn weights(k: usize) -> DVector<f64> {
    let n = 2 * k + 2;
    DVector::from_fn(n, |i, _| {
        if i < 2 * k {
            1.0 / (k as f64).sqrt()
        } else if i == 2 * k {
            0.05
        } else {
            1.0
        }
    })
}

struct Eval {
    residual: DVector<f64>,
    jac: DMatrix<f64>,
    segments: Vec<Segment>,
}

impl Eval {
    fn closure(&self) -> f64 {
        let n = self.residual.len() - 1;
        self.residual.rows(0, n).amax()
    }

    fn multiplier(&self) -> f64 {
        self.segments.iter().map(|s| s.trace).sum::<f64>().exp()
    }
}

fn evaluate(u: &DVector<f64>, p: &BursterParams, o: &ContinuationOptions) -> Result<Eval, BursterError> {
    let k = (u.len() - 2) / 2;
    let (period, y) = (u[2 * k], u[2 * k + 1]);
    if !(period > 0.0) {
        return Err(BursterError::Continuation {
            y,
            reason: format!("non-positive period {period}"),
        });
    }
    let dt = period / k as f64;
    let mut residual = DVector::zeros(2 * k + 1);
    let mut jac = DMatrix::zeros(2 * k + 1, 2 * k + 2);
    let mut segments = Vec::with_capacity(k);
    for j in 0..k {
        let seg = flow_segment([u[2 * j], u[2 * j + 1]], dt, y, p, o)?;
        let next = (j + 1) % k;
        for i in 0..2 {
            residual[2 * j + i] = seg.end[i] - u[2 * next + i];
            for c in 0..2 {
                jac[(2 * j + i, 2 * j + c)] += seg.m[i][c];
            }
            jac[(2 * j + i, 2 * next + i)] -= 1.0;
            jac[(2 * j + i, 2 * k)] = seg.f_end[i] / k as f64;
            jac[(2 * j + i, 2 * k + 1)] = seg.s[i];
        }
        segments.push(seg);
    }
    let (v_eq, _, dv) = v_eq_and_slope(y, p);
    residual[2 * k] = u[0] - v_eq;
    jac[(2 * k, 0)] = 1.0;
    jac[(2 * k, 2 * k + 1)] = -dv;
    Ok(Eval { residual, jac, segments })
}

fn augmented(jac: &DMatrix<f64>, tangent: &DVector<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let n = jac.ncols();
    let mut a = jac.clone().insert_row(n - 1, 0.0);
    for i in 0..n {
        a[(n - 1, i)] = w[i] * w[i] * tangent[i];
    }
    a
}

/// Null vector of `jac` oriented along `prev`, unit length in the weighted metric.
fn tangent(jac: &DMatrix<f64>, prev: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>, BursterError> {
    let n = jac.ncols();
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let z = augmented(jac, prev, w).lu().solve(&rhs).ok_or_else(|| BursterError::Continuation {
        y: f64::NAN,
        reason: "singular tangent system".into(),
    })?;
    let norm = z.component_mul(w).norm();
    Ok(z / norm)
}

/// Newton corrector on the shooting equations plus `<t, u - u_pred> = 0`.
fn correct(
    pred: &DVector<f64>,
    t: &DVector<f64>,
    p: &BursterParams,
    o: &ContinuationOptions,
) -> Result<(DVector<f64>, Eval, usize), BursterError> {
    let k = (pred.len() - 2) / 2;
    let w = weights(k);
    let mut u = pred.clone();
    for iter in 1..=12 {
        let ev = evaluate(&u, p, o)?;
        let g = (&u - pred).component_mul(&w).component_mul(&w).dot(t);
        if ev.residual.amax() < o.newton_tol && g.abs() < o.newton_tol {
            return Ok((u, ev, iter));
        }
        let rhs = -ev.residual.clone().insert_row(2 * k + 1, g);
        let step = augmented(&ev.jac, t, &w).lu().solve(&rhs).ok_or_else(|| BursterError::Continuation {
            y: u[2 * k + 1],
            reason: "singular Newton matrix".into(),
        })?;
        u += step;
        if !u.iter().all(|x| x.is_finite()) {
            break;
        }
    }
    Err(BursterError::Continuation {
        y: u[2 * k + 1],
        reason: "Newton corrector did not converge".into(),
    })
}

fn make_cycle(u: &DVector<f64>, ev: &Eval, p: &BursterParams, o: &ContinuationOptions) -> Result<LimitCycle, BursterError> {
    let k = (u.len() - 2) / 2;
    let (period, y) = (u[2 * k], u[2 * k + 1]);
    let (_, w_eq, _) = v_eq_and_slope(y, p);
    let sys = super::fast::FastSystem::new(y, p);
    let opts = IntegratorOptions::with_tolerances(o.rtol, o.atol);
    let per = o.states_per_cycle.div_ceil(k).max(1);
    let dt = period / k as f64;
    let mut states = Vec::with_capacity(k * per);
    let (mut v_min, mut v_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..k {
        let x0 = [u[2 * j], u[2 * j + 1]];
        states.push(x0);
        let mut it = Dop853::new(&sys, 0.0, x0, dt, opts)?;
        let mut next = 1;
        v_min = v_min.min(x0[0]);
        v_max = v_max.max(x0[0]);
        while it.step()? {
            v_min = v_min.min(it.y()[0]);
            v_max = v_max.max(it.y()[0]);
            while next < per && dt * next as f64 / per as f64 <= it.t() {
                states.push(it.interpolate(dt * next as f64 / per as f64));
                next += 1;
            }
        }
    }
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for s in &ev.segments {
        let a = s.m;
        m = [
            [a[0][0] * m[0][0] + a[0][1] * m[1][0], a[0][0] * m[0][1] + a[0][1] * m[1][1]],
            [a[1][0] * m[0][0] + a[1][1] * m[1][0], a[1][0] * m[0][1] + a[1][1] * m[1][1]],
        ];
    }
    let tr = m[0][0] + m[1][1];
    let det: f64 = ev.segments.iter().map(|s| s.m[0][0] * s.m[1][1] - s.m[0][1] * s.m[1][0]).product();
    let full_det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr / 4.0 - full_det).max(0.0).sqrt();
    let (e1, e2) = (tr / 2.0 + disc, tr / 2.0 - disc);
    let trivial = if (e1 - 1.0).abs() < (e2 - 1.0).abs() { e1 } else { e2 };
    Ok(LimitCycle {
        period,
        anchor: [u[0], u[1]],
        amplitude: w_eq - u[1],
        v_min,
        v_max,
        multipliers: [trivial, ev.multiplier()],
        monodromy_det: det,
        closure: ev.closure(),
        states,
    })
}

/// Converges onto the attracting relaxation cycle at `y` and returns the
/// multiple-shooting unknowns with `x_1` on the anchor line.
fn seed_cycle(y: f64, p: &BursterParams, k: usize) -> Result<DVector<f64>, BursterError> {
    let e = fast_equilibrium(y, p);
    let sys = super::fast::FastSystem::new(y, p);
    let opts = IntegratorOptions::with_tolerances(1e-11, 1e-13);
    let mut it = Dop853::new(&sys, 0.0, [e.v + 0.5, e.w], 5000.0, opts)?;
    let mut crossings = Vec::new();
    while it.step()? {
        let (a, b) = (it.y_prev()[0] - e.v, it.y()[0] - e.v);
        if a < 0.0 && b >= 0.0 && it.y()[1] < e.w {
            crossings.push(it.locate(|x| x[0] - e.v, 1e-13));
        }
    }
    let n = crossings.len();
    if n < 3 {
        return Err(BursterError::Continuation {
            y,
            reason: "no oscillation at the seed value".into(),
        });
    }
    let x1 = crossings[n - 1].1;
    let period = crossings[n - 1].0 - crossings[n - 2].0;
    let mut u = DVector::zeros(2 * k + 2);
    let mut it = Dop853::new(&sys, 0.0, x1, period, opts)?;
    u[0] = x1[0];
    u[1] = x1[1];
    let mut j = 1;
    while it.step()? {
        while j < k && period * j as f64 / k as f64 <= it.t() {
            let x = it.interpolate(period * j as f64 / k as f64);
            u[2 * j] = x[0];
            u[2 * j + 1] = x[1];
            j += 1;
        }
    }
    u[2 * k] = period;
    u[2 * k + 1] = y;
    Ok(u)
}

/// Limit-cycle branch of the fast subsystem by multiple shooting. Starts on
/// the attracting relaxation cycle at `y_range.1`, moves toward smaller
/// `y`, rounds the fold, and follows the repelling cycles until their
/// amplitude drops below `amplitude_min`; the Hopf endpoint is then
/// extrapolated with `y - y_AH ∝ amplitude^2`.
pub fn fast_limit_cycle_continuation(
    y_range: (f64, f64),
    p: &BursterParams,
    steps: usize,
    o: &ContinuationOptions,
) -> Result<FastBranch, BursterError> {
    let (lo, hi) = y_range;
    if !(hi > lo) {
        return Err(BursterError::invalid("y_range", format!("need lo < hi, got ({lo}, {hi})")));
    }
    let k = o.segments.max(2);
    let w = weights(k);
    let yi = 2 * k + 1;
    let seed = seed_cycle(hi, p, k)?;
    let mut t = DVector::zeros(2 * k + 2);
    t[yi] = -1.0;
    let (mut u, ev0, _) = correct(&seed, &t, p, o)?;
    t = tangent(&ev0.jac, &t, &w)?;
    let mut samples = vec![BranchSample {
        y: u[yi],
        arclength: 0.0,
        object: BranchObject::LimitCycle(make_cycle(&u, &ev0, p, o)?),
    }];
    let mut special_points = Vec::new();
    let mut last_mult = ev0.multiplier();
    let mut arclength = 0.0;
    let mut ds = o.ds;
    for _ in 0..steps {
        let mut halvings = 0;
        let (un, evn, iters) = loop {
            let attempt = correct(&(&u + &t * ds), &t, p, o);
            let retry = match &attempt {
                Ok((_, ev, _)) => {
                    let m = ev.multiplier();
                    (m.ln() - last_mult.ln()).abs() > o.max_log_multiplier_jump || (m - last_mult).abs() > o.max_multiplier_jump
                }
                Err(_) => true,
            };
            if !retry || (attempt.is_ok() && ds <= o.ds_min) {
                break attempt?;
            }
            halvings += 1;
            ds *= 0.5;
            if halvings > 40 || ds < o.ds_min {
                return Err(attempt.err().unwrap_or(BursterError::Continuation {
                    y: u[yi],
                    reason: "step size underflow".into(),
                }));
            }
        };
        let mult = evn.multiplier();
        if (last_mult - 1.0) * (mult - 1.0) < 0.0 && special_points.iter().all(|s: &SpecialPoint| s.kind != SpecialKind::Fold) {
            let (uf, evf, sf) = locate_fold(&u, &t, ds, last_mult, p, o)?;
            let cyc = make_cycle(&uf, &evf, p, o)?;
            special_points.push(SpecialPoint {
                kind: SpecialKind::Fold,
                y: uf[yi],
                v: cyc.anchor[0],
                w: cyc.anchor[1],
                multiplier: cyc.multipliers[1],
                arclength: arclength + sf,
            });
            samples.push(BranchSample {
                y: uf[yi],
                arclength: arclength + sf,
                object: BranchObject::LimitCycle(cyc),
            });
        }
        arclength += ds;
        let tn = tangent(&evn.jac, &t, &w)?;
        let cyc = make_cycle(&un, &evn, p, o)?;
        let amplitude = cyc.amplitude;
        samples.push(BranchSample {
            y: un[yi],
            arclength,
            object: BranchObject::LimitCycle(cyc),
        });
        u = un;
        t = tn;
        last_mult = mult;
        if amplitude < o.amplitude_min || u[yi] < lo || u[yi] > hi {
            break;
        }
        // shrink steps as the cycle collapses so the endpoint fit stays local
        let cap = o.ds_max.min(0.5 * amplitude);
        ds = if iters <= 3 && halvings == 0 { (ds * 1.5).min(cap) } else { (ds * 0.9).min(cap) };
    }
    if let Some(ah) = hopf_endpoint(&samples, p, o.amplitude_min) {
        special_points.push(ah);
    }
    Ok(FastBranch {
        kind: BranchKind::LimitCycle,
        samples,
        special_points,
    })
}

/// Bisection in arclength between `u` and `u + ds t` on the sign of `mult - 1`.
fn locate_fold(
    u: &DVector<f64>,
    t: &DVector<f64>,
    ds: f64,
    mult_at_u: f64,
    p: &BursterParams,
    o: &ContinuationOptions,
) -> Result<(DVector<f64>, Eval, f64), BursterError> {
    let (mut a, mut b) = (0.0, ds);
    let above = mult_at_u > 1.0;
    let mut best = None;
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let (um, em, _) = correct(&(u + t * m), t, p, o)?;
        let mult = em.multiplier();
        let done = (mult - 1.0).abs() < 1e-9 || (b - a) < 1e-8;
        if (mult > 1.0) == above {
            a = m;
        } else {
            b = m;
        }
        best = Some((um, em, m));
        if done {
            break;
        }
    }
    best.ok_or_else(|| BursterError::Continuation {
        y: u[u.len() - 1],
        reason: "fold bisection failed".into(),
    })
}

/// Extrapolates the last two cycles to zero amplitude.
fn hopf_endpoint(samples: &[BranchSample], p: &BursterParams, amplitude_min: f64) -> Option<SpecialPoint> {
    let cyc: Vec<(f64, f64, f64)> = samples
        .iter()
        .filter_map(|s| match &s.object {
            BranchObject::LimitCycle(c) => Some((s.y, c.amplitude, s.arclength)),
            BranchObject::Equilibrium(_) => None,
        })
        .collect();
    let n = cyc.len();
    if n < 2 {
        return None;
    }
    let (ya, aa, sa) = cyc[n - 1];
    let (yb, ab, _) = cyc[n - 2];
    let denom = ab * ab - aa * aa;
    if aa > amplitude_min || denom <= 0.0 {
        return None;
    }
    let y = ya - (yb - ya) * aa * aa / denom;
    let e = fast_equilibrium(y, p);
    Some(SpecialPoint {
        kind: SpecialKind::AndronovHopf,
        y,
        v: e.v,
        w: e.w,
        multiplier: f64::NAN,
        arclength: sa + aa,
    })
}
