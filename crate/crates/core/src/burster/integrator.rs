//! Adaptive explicit Runge-Kutta integration of order 8 with embedded error
//! estimators of orders 5 and 3, seventh-order dense output and event
//! location on the interpolant.

use super::tableau::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Autonomous or non-autonomous right-hand side on `R^N`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Near weakly unstable equilibria, unbounded steps damp deviations
    /// below the tolerance and pin the orbit there.
    pub h_max: f64,
    pub max_steps: usize,
    /// Abort when any component exceeds this magnitude.
    pub divergence_bound: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            h_max: 1.0,
            max_steps: 50_000_000,
            divergence_bound: 1e3,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("state left |x| <= {bound} at t = {t}")]
    Divergence { t: f64, bound: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("step limit {max_steps} reached at t = {t}")]
    MaxSteps { t: f64, max_steps: usize },
    #[error("invalid integration request: {0}")]
    Invalid(String),
}

const SAFE: f64 = 0.9;
const FACC1: f64 = 1.0 / 0.333;
const FACC2: f64 = 1.0 / 6.0;
const EXPO1: f64 = 1.0 / 8.0;

#[inline]
fn comb<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        out[i] += h * s;
    }
    out
}

#[derive(Clone, Copy)]
struct Stages<const N: usize> {
    k1: [f64; N],
    k6: [f64; N],
    k7: [f64; N],
    k8: [f64; N],
    k9: [f64; N],
    k10: [f64; N],
    k11: [f64; N],
    k12: [f64; N],
    k13: [f64; N],
}

/// A stepping integrator. Each call to [`Dop853::step`] advances by one
/// accepted step; the last step can be interpolated with
/// [`Dop853::interpolate`]. Integration runs backward when `t_end < t0`.
pub struct Dop853<'a, S, const N: usize> {
    sys: &'a S,
    opts: IntegratorOptions,
    t: f64,
    y: [f64; N],
    f: [f64; N],
    t_end: f64,
    dir: f64,
    h: f64,
    t_old: f64,
    y_old: [f64; N],
    h_old: f64,
    stages: Option<Stages<N>>,
    dense: Option<[[f64; N]; 8]>,
    facold: f64,
    steps: usize,
    evals: usize,
    last_rejected: bool,
}

impl<'a, S: OdeSystem<N>, const N: usize> Dop853<'a, S, N> {
    pub fn new(sys: &'a S, t0: f64, y0: [f64; N], t_end: f64, opts: IntegratorOptions) -> Result<Self, IntegrationError> {
        if !(opts.rtol > 0.0 && opts.atol > 0.0) {
            return Err(IntegrationError::Invalid("tolerances must be positive".into()));
        }
        if !t0.is_finite() || !t_end.is_finite() || y0.iter().any(|v| !v.is_finite()) {
            return Err(IntegrationError::Invalid("non-finite start".into()));
        }
        let mut f = [0.0; N];
        sys.rhs(t0, &y0, &mut f);
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let mut s = Self {
            sys,
            opts,
            t: t0,
            y: y0,
            f,
            t_end,
            dir,
            h: 0.0,
            t_old: t0,
            y_old: y0,
            h_old: 0.0,
            stages: None,
            dense: None,
            facold: 1e-4,
            steps: 0,
            evals: 1,
            last_rejected: false,
        };
        s.h = s.initial_step();
        Ok(s)
    }

    fn initial_step(&mut self) -> f64 {
        let (rtol, atol) = (self.opts.rtol, self.opts.atol);
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..N {
            let sk = atol + rtol * self.y[i].abs();
            dnf += (self.f[i] / sk).powi(2);
            dny += (self.y[i] / sk).powi(2);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
        h = h.min(self.opts.h_max) * self.dir;
        let y1 = comb(&self.y, h, &[(1.0, &self.f)]);
        let mut f1 = [0.0; N];
        self.sys.rhs(self.t + h, &y1, &mut f1);
        self.evals += 1;
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = atol + rtol * self.y[i].abs();
            der2 += ((f1[i] - self.f[i]) / sk).powi(2);
        }
        let der2 = der2.sqrt() / h.abs();
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h.abs() * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(1.0 / 8.0)
        };
        (100.0 * h.abs()).min(h1).min(self.opts.h_max) * self.dir
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Derivative at the current point.
    pub fn dydt(&self) -> &[f64; N] {
        &self.f
    }

    pub fn t_prev(&self) -> f64 {
        self.t_old
    }

    pub fn y_prev(&self) -> &[f64; N] {
        &self.y_old
    }

    pub fn evals(&self) -> usize {
        self.evals
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn finished(&self) -> bool {
        self.t == self.t_end
    }

    /// Advances by one accepted step. Returns `Ok(false)` once `t_end` is reached.
    pub fn step(&mut self) -> Result<bool, IntegrationError> {
        if self.finished() {
            return Ok(false);
        }
        loop {
            if self.steps >= self.opts.max_steps {
                return Err(IntegrationError::MaxSteps {
                    t: self.t,
                    max_steps: self.opts.max_steps,
                });
            }
            if self.h.abs() <= 1e-14 * self.t.abs().max(1.0) {
                return Err(IntegrationError::StepUnderflow { t: self.t });
            }
            let mut last = false;
            if (self.t + self.h - self.t_end) * self.dir >= 0.0 {
                self.h = self.t_end - self.t;
                last = true;
            }
            self.steps += 1;
            let (t, h, y) = (self.t, self.h, self.y);
            let sys = self.sys;
            let k1 = self.f;
            let mut k2 = [0.0; N];
            let mut k3 = [0.0; N];
            let mut k4 = [0.0; N];
            let mut k5 = [0.0; N];
            let mut k6 = [0.0; N];
            let mut k7 = [0.0; N];
            let mut k8 = [0.0; N];
            let mut k9 = [0.0; N];
            let mut k10 = [0.0; N];
            let mut k11 = [0.0; N];
            let mut k12 = [0.0; N];
            sys.rhs(t + C2 * h, &comb(&y, h, &[(A21, &k1)]), &mut k2);
            sys.rhs(t + C3 * h, &comb(&y, h, &[(A31, &k1), (A32, &k2)]), &mut k3);
            sys.rhs(t + C4 * h, &comb(&y, h, &[(A41, &k1), (A43, &k3)]), &mut k4);
            sys.rhs(t + C5 * h, &comb(&y, h, &[(A51, &k1), (A53, &k3), (A54, &k4)]), &mut k5);
            sys.rhs(t + C6 * h, &comb(&y, h, &[(A61, &k1), (A64, &k4), (A65, &k5)]), &mut k6);
            sys.rhs(t + C7 * h, &comb(&y, h, &[(A71, &k1), (A74, &k4), (A75, &k5), (A76, &k6)]), &mut k7);
            sys.rhs(
                t + C8 * h,
                &comb(&y, h, &[(A81, &k1), (A84, &k4), (A85, &k5), (A86, &k6), (A87, &k7)]),
                &mut k8,
            );
            sys.rhs(
                t + C9 * h,
                &comb(&y, h, &[(A91, &k1), (A94, &k4), (A95, &k5), (A96, &k6), (A97, &k7), (A98, &k8)]),
                &mut k9,
            );
            sys.rhs(
                t + C10 * h,
                &comb(
                    &y,
                    h,
                    &[(A101, &k1), (A104, &k4), (A105, &k5), (A106, &k6), (A107, &k7), (A108, &k8), (A109, &k9)],
                ),
                &mut k10,
            );
            sys.rhs(
                t + C11 * h,
                &comb(
                    &y,
                    h,
                    &[
                        (A111, &k1),
                        (A114, &k4),
                        (A115, &k5),
                        (A116, &k6),
                        (A117, &k7),
                        (A118, &k8),
                        (A119, &k9),
                        (A1110, &k10),
                    ],
                ),
                &mut k11,
            );
            let t_new = t + h;
            let yy1 = comb(
                &y,
                h,
                &[
                    (A121, &k1),
                    (A124, &k4),
                    (A125, &k5),
                    (A126, &k6),
                    (A127, &k7),
                    (A128, &k8),
                    (A129, &k9),
                    (A1210, &k10),
                    (A1211, &k11),
                ],
            );
            sys.rhs(t_new, &yy1, &mut k12);
            self.evals += 11;
            let mut incr = [0.0; N];
            for i in 0..N {
                incr[i] = B1 * k1[i] + B6 * k6[i] + B7 * k7[i] + B8 * k8[i] + B9 * k9[i] + B10 * k10[i] + B11 * k11[i] + B12 * k12[i];
            }
            let y_new = comb(&y, h, &[(1.0, &incr)]);

            let mut err = 0.0;
            let mut err2 = 0.0;
            for i in 0..N {
                let sk = self.opts.atol + self.opts.rtol * y[i].abs().max(y_new[i].abs());
                let e2 = incr[i] - BHH1 * k1[i] - BHH2 * k9[i] - BHH3 * k12[i];
                err2 += (e2 / sk).powi(2);
                let e = ER1 * k1[i] + ER6 * k6[i] + ER7 * k7[i] + ER8 * k8[i] + ER9 * k9[i] + ER10 * k10[i] + ER11 * k11[i] + ER12 * k12[i];
                err += (e / sk).powi(2);
            }
            let mut deno = err + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h.abs() * err * (1.0 / (deno * N as f64)).sqrt();
            let fac11 = err.powf(EXPO1);
            let fac = FACC2.max(FACC1.min(fac11 / SAFE));
            let mut h_new = h / fac;

            if err <= 1.0 && err.is_finite() {
                self.facold = err.max(1e-4);
                let mut k13 = [0.0; N];
                sys.rhs(t_new, &y_new, &mut k13);
                self.evals += 1;
                self.stages = Some(Stages {
                    k1,
                    k6,
                    k7,
                    k8,
                    k9,
                    k10,
                    k11,
                    k12,
                    k13,
                });
                self.dense = None;
                self.t_old = t;
                self.y_old = y;
                self.h_old = h;
                self.y = y_new;
                self.f = k13;
                self.t = if last { self.t_end } else { t_new };
                if self.last_rejected {
                    h_new = if self.dir > 0.0 { h_new.min(h) } else { h_new.max(h) };
                }
                self.last_rejected = false;
                self.h = if h_new.abs() > self.opts.h_max { self.opts.h_max * self.dir } else { h_new };
                if self.y.iter().any(|v| !v.is_finite() || v.abs() > self.opts.divergence_bound) {
                    return Err(IntegrationError::Divergence {
                        t: self.t,
                        bound: self.opts.divergence_bound,
                    });
                }
                return Ok(true);
            }
            self.last_rejected = true;
            self.h = if err.is_finite() { h / FACC1.min(fac11 / SAFE) } else { h * 0.1 };
        }
    }

    fn dense_coefficients(&mut self) -> [[f64; N]; 8] {
        if let Some(d) = self.dense {
            return d;
        }
        let st = self.stages.expect("interpolation before the first step");
        let h = self.h_old;
        let (y0, y1) = (self.y_old, self.y);
        let mut c = [[0.0; N]; 8];
        for i in 0..N {
            let ydiff = y1[i] - y0[i];
            let bspl = h * st.k1[i] - ydiff;
            c[0][i] = y0[i];
            c[1][i] = ydiff;
            c[2][i] = bspl;
            c[3][i] = ydiff - h * st.k13[i] - bspl;
            c[4][i] = D41 * st.k1[i] + D46 * st.k6[i] + D47 * st.k7[i] + D48 * st.k8[i] + D49 * st.k9[i] + D410 * st.k10[i] + D411 * st.k11[i] + D412 * st.k12[i];
            c[5][i] = D51 * st.k1[i] + D56 * st.k6[i] + D57 * st.k7[i] + D58 * st.k8[i] + D59 * st.k9[i] + D510 * st.k10[i] + D511 * st.k11[i] + D512 * st.k12[i];
            c[6][i] = D61 * st.k1[i] + D66 * st.k6[i] + D67 * st.k7[i] + D68 * st.k8[i] + D69 * st.k9[i] + D610 * st.k10[i] + D611 * st.k11[i] + D612 * st.k12[i];
            c[7][i] = D71 * st.k1[i] + D76 * st.k6[i] + D77 * st.k7[i] + D78 * st.k8[i] + D79 * st.k9[i] + D710 * st.k10[i] + D711 * st.k11[i] + D712 * st.k12[i];
        }
        let mut k14 = [0.0; N];
        let mut k15 = [0.0; N];
        let mut k16 = [0.0; N];
        let t0 = self.t_old;
        self.sys.rhs(
            t0 + C14 * h,
            &comb(
                &y0,
                h,
                &[
                    (A141, &st.k1),
                    (A147, &st.k7),
                    (A148, &st.k8),
                    (A149, &st.k9),
                    (A1410, &st.k10),
                    (A1411, &st.k11),
                    (A1412, &st.k12),
                    (A1413, &st.k13),
                ],
            ),
            &mut k14,
        );
        self.sys.rhs(
            t0 + C15 * h,
            &comb(
                &y0,
                h,
                &[
                    (A151, &st.k1),
                    (A156, &st.k6),
                    (A157, &st.k7),
                    (A158, &st.k8),
                    (A1511, &st.k11),
                    (A1512, &st.k12),
                    (A1513, &st.k13),
                    (A1514, &k14),
                ],
            ),
            &mut k15,
        );
        self.sys.rhs(
            t0 + C16 * h,
            &comb(
                &y0,
                h,
                &[
                    (A161, &st.k1),
                    (A166, &st.k6),
                    (A167, &st.k7),
                    (A168, &st.k8),
                    (A169, &st.k9),
                    (A1613, &st.k13),
                    (A1614, &k14),
                    (A1615, &k15),
                ],
            ),
            &mut k16,
        );
        self.evals += 3;
        for i in 0..N {
            c[4][i] = h * (c[4][i] + D413 * st.k13[i] + D414 * k14[i] + D415 * k15[i] + D416 * k16[i]);
            c[5][i] = h * (c[5][i] + D513 * st.k13[i] + D514 * k14[i] + D515 * k15[i] + D516 * k16[i]);
            c[6][i] = h * (c[6][i] + D613 * st.k13[i] + D614 * k14[i] + D615 * k15[i] + D616 * k16[i]);
            c[7][i] = h * (c[7][i] + D713 * st.k13[i] + D714 * k14[i] + D715 * k15[i] + D716 * k16[i]);
        }
        self.dense = Some(c);
        c
    }

    /// Dense output on the last accepted step, `t` between `t_prev` and `t`.
    pub fn interpolate(&mut self, t: f64) -> [f64; N] {
        if self.stages.is_none() {
            return self.y;
        }
        let c = self.dense_coefficients();
        let s = (t - self.t_old) / self.h_old;
        let s1 = 1.0 - s;
        let mut out = [0.0; N];
        for i in 0..N {
            let conpar = c[4][i] + (c[5][i] + (c[6][i] + c[7][i] * s) * s1) * s;
            out[i] = c[0][i] + (c[1][i] + (c[2][i] + (c[3][i] + conpar * s1) * s) * s1) * s;
        }
        out
    }

    /// Locates a zero of `g` on the last step given a sign change between its
    /// endpoints. Uses the Illinois variant of regula falsi on the dense
    /// output until the time bracket is below `tol`.
    pub fn locate<G: Fn(&[f64; N]) -> f64>(&mut self, g: G, tol: f64) -> (f64, [f64; N]) {
        let (mut a, mut b) = (self.t_old, self.t);
        let (mut ga, mut gb) = (g(&self.y_old), g(&self.y));
        if ga == 0.0 {
            return (a, self.y_old);
        }
        if gb == 0.0 {
            return (b, self.y);
        }
        let mut side = 0i8;
        let mut x = 0.5 * (a + b);
        let mut yx = self.interpolate(x);
        for _ in 0..200 {
            if (b - a).abs() <= tol {
                break;
            }
            x = (a * gb - b * ga) / (gb - ga);
            // keep the iterate strictly inside; fall back to bisection
            if !(x - a.min(b) > 0.0 && a.max(b) - x > 0.0) {
                x = 0.5 * (a + b);
            }
            yx = self.interpolate(x);
            let gx = g(&yx);
            if gx == 0.0 {
                return (x, yx);
            }
            if (gx > 0.0) == (gb > 0.0) {
                b = x;
                gb = gx;
                if side == -1 {
                    ga *= 0.5;
                }
                side = -1;
            } else {
                a = x;
                ga = gx;
                if side == 1 {
                    gb *= 0.5;
                }
                side = 1;
            }
            // a bracket stuck on one side shrinks slowly; bisect then
            if (b - a).abs() > tol && side != 0 {
                let mid = 0.5 * (a + b);
                let ym = self.interpolate(mid);
                let gm = g(&ym);
                if gm == 0.0 {
                    return (mid, ym);
                }
                if (gm > 0.0) == (gb > 0.0) {
                    b = mid;
                    gb = gm;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
        }
        let t = 0.5 * (a + b);
        let _ = yx;
        (t, self.interpolate(t))
    }
}

/// Integrates from `t0` to `t_end` and returns the final state.
pub fn integrate_to<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: IntegratorOptions,
) -> Result<[f64; N], IntegrationError> {
    let mut it = Dop853::new(sys, t0, y0, t_end, opts)?;
    while it.step()? {}
    Ok(*it.y())
}

/// A trajectory sampled on a uniform time grid from the dense output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    #[serde(with = "serde_arrays")]
    pub y: Vec<[f64; N]>,
}

mod serde_arrays {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(v: &[[f64; N]], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            seq.serialize_element(&row[..])?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(d: D) -> Result<Vec<[f64; N]>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.try_into()
                    .map_err(|r: Vec<f64>| serde::de::Error::invalid_length(r.len(), &"state row"))
            })
            .collect()
    }
}

/// Samples the solution every `dt` on `[t0, t_end]` (forward only).
pub fn sample<S: OdeSystem<N>, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    dt: f64,
    opts: IntegratorOptions,
) -> Result<Trajectory<N>, IntegrationError> {
    if !(dt > 0.0) || t_end < t0 {
        return Err(IntegrationError::Invalid("sampling needs dt > 0 and t_end >= t0".into()));
    }
    let mut it = Dop853::new(sys, t0, y0, t_end, opts)?;
    let mut out = Trajectory {
        t: vec![t0],
        y: vec![y0],
    };
    let mut k = 1usize;
    while it.step()? {
        loop {
            let tk = t0 + dt * k as f64;
            if tk > it.t() || tk > t_end {
                break;
            }
            let yk = if tk == it.t() { *it.y() } else { it.interpolate(tk) };
            out.t.push(tk);
            out.y.push(yk);
            k += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Osc;
    impl OdeSystem<2> for Osc {
        fn rhs(&self, _t: f64, y: &[f64; 2], dy: &mut [f64; 2]) {
            dy[0] = y[1];
            dy[1] = -y[0];
        }
    }

    struct Decay;
    impl OdeSystem<1> for Decay {
        fn rhs(&self, _t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = -y[0];
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let y = integrate_to(&Osc, 0.0, [1.0, 0.0], 20.0, IntegratorOptions::with_tolerances(1e-12, 1e-14)).unwrap();
        assert!((y[0] - 20f64.cos()).abs() < 1e-10);
        assert!((y[1] + 20f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn dense_output_is_accurate() {
        let opts = IntegratorOptions::with_tolerances(1e-10, 1e-12);
        let tr = sample(&Osc, 0.0, [1.0, 0.0], 10.0, 0.01, opts).unwrap();
        assert_eq!(tr.t.len(), 1001);
        for (t, y) in tr.t.iter().zip(&tr.y) {
            assert!((y[0] - t.cos()).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn backward_integration_round_trip() {
        let opts = IntegratorOptions::default();
        let y1 = integrate_to(&Osc, 0.0, [0.3, -0.2], 5.0, opts).unwrap();
        let y0 = integrate_to(&Osc, 5.0, y1, 0.0, opts).unwrap();
        assert!((y0[0] - 0.3).abs() < 100.0 * opts.rtol);
        assert!((y0[1] + 0.2).abs() < 100.0 * opts.rtol);
    }

    #[test]
    fn event_location() {
        let opts = IntegratorOptions::with_tolerances(1e-13, 1e-15);
        let mut it = Dop853::new(&Osc, 0.0, [1.0, 0.0], 10.0, opts).unwrap();
        let mut crossings = Vec::new();
        while it.step().unwrap() {
            if it.y_prev()[0] > 0.0 && it.y()[0] <= 0.0 {
                crossings.push(it.locate(|y| y[0], 1e-12).0);
            }
        }
        assert_eq!(crossings.len(), 2);
        assert!((crossings[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((crossings[1] - 5.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    struct Blow;
    impl OdeSystem<1> for Blow {
        fn rhs(&self, _t: f64, y: &[f64; 1], dy: &mut [f64; 1]) {
            dy[0] = y[0] * y[0];
        }
    }

    #[test]
    fn divergence_guard() {
        let e = integrate_to(&Blow, 0.0, [1.0], 2.0, IntegratorOptions::default()).unwrap_err();
        match e {
            IntegrationError::Divergence { t, .. } => assert!(t < 1.0),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn decay_to_exact() {
        let y = integrate_to(&Decay, 0.0, [1.0], 3.0, IntegratorOptions::default()).unwrap();
        assert!((y[0] - (-3f64).exp()).abs() < 1e-9);
    }
}
