//! The three-dimensional slow-fast burster
//!
//! ```text
//! v' = v - v^3/3 - w + y + I
//! w' = delta (0.7 + v - 0.8 w)
//! y' = mu_slow (c - y - v)
//! ```

use super::integrator::{sample, IntegrationError, IntegratorOptions, OdeSystem, Trajectory};
use super::BursterError;
use serde::{Deserialize, Serialize};

/// Recovery offset and gain of the `w` equation.
pub const W_OFFSET: f64 = 0.7;
pub const W_GAIN: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct BursterParams {
    pub delta: f64,
    pub mu_slow: f64,
    pub c: f64,
    #[serde(rename = "I")]
    pub drive: f64,
}

#[derive(Deserialize)]
struct RawParams {
    delta: f64,
    mu_slow: f64,
    c: f64,
    #[serde(rename = "I")]
    drive: f64,
}

impl TryFrom<RawParams> for BursterParams {
    type Error = BursterError;
    fn try_from(r: RawParams) -> Result<Self, Self::Error> {
        Self::new(r.delta, r.mu_slow, r.c, r.drive)
    }
}

impl BursterParams {
    pub const DEFAULT_DELTA: f64 = 0.08;
    pub const DEFAULT_MU_SLOW: f64 = 0.002;
    pub const DEFAULT_DRIVE: f64 = 0.8;

    pub fn new(delta: f64, mu_slow: f64, c: f64, drive: f64) -> Result<Self, BursterError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(BursterError::invalid("delta", format!("must be positive, got {delta}")));
        }
        if !(mu_slow > 0.0 && mu_slow.is_finite()) {
            return Err(BursterError::invalid("mu_slow", format!("must be positive, got {mu_slow}")));
        }
        if !c.is_finite() || !drive.is_finite() {
            return Err(BursterError::invalid("c/I", "must be finite".to_string()));
        }
        if mu_slow > 0.1 {
            log::warn!("mu_slow = {mu_slow} is not small; slow-fast structure is weak");
        }
        Ok(Self {
            delta,
            mu_slow,
            c,
            drive,
        })
    }

    /// Default `delta`, `mu_slow` and `I` at the given `c`.
    pub fn with_c(c: f64) -> Self {
        Self {
            delta: Self::DEFAULT_DELTA,
            mu_slow: Self::DEFAULT_MU_SLOW,
            c,
            drive: Self::DEFAULT_DRIVE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BursterState {
    pub v: f64,
    pub w: f64,
    pub y: f64,
}

impl BursterState {
    pub fn new(v: f64, w: f64, y: f64) -> Self {
        Self { v, w, y }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v, self.w, self.y]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self {
            v: a[0],
            w: a[1],
            y: a[2],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.w.is_finite() && self.y.is_finite()
    }
}

pub fn rhs(s: BursterState, p: &BursterParams) -> [f64; 3] {
    [
        s.v - s.v * s.v * s.v / 3.0 - s.w + s.y + p.drive,
        p.delta * (W_OFFSET + s.v - W_GAIN * s.w),
        p.mu_slow * (p.c - s.y - s.v),
    ]
}

pub fn jacobian(s: BursterState, p: &BursterParams) -> [[f64; 3]; 3] {
    [
        [1.0 - s.v * s.v, -1.0, 1.0],
        [p.delta, -W_GAIN * p.delta, 0.0],
        [-p.mu_slow, 0.0, -p.mu_slow],
    ]
}

/// Trace of the Jacobian.
pub fn divergence(s: BursterState, p: &BursterParams) -> f64 {
    1.0 - s.v * s.v - W_GAIN * p.delta - p.mu_slow
}

impl OdeSystem<3> for BursterParams {
    fn rhs(&self, _t: f64, y: &[f64; 3], dy: &mut [f64; 3]) {
        *dy = rhs(BursterState::from_array(*y), self);
    }
}

/// Integration seed: the fast equilibrium at `y = c`, shifted by `+0.1` in `v`.
pub fn standard_seed(p: &BursterParams) -> BursterState {
    let eq = super::fast::fast_equilibrium(p.c, p);
    BursterState::new(eq.v + 0.1, eq.w, p.c)
}

/// Integrates for `t_span` and samples the dense output every `dt`.
pub fn integrate(
    start: BursterState,
    p: &BursterParams,
    t_span: f64,
    dt: f64,
    opts: IntegratorOptions,
) -> Result<Trajectory<3>, IntegrationError> {
    if !(t_span > 0.0) {
        return Err(IntegrationError::Invalid(format!("t_span must be positive, got {t_span}")));
    }
    if !start.is_finite() {
        return Err(IntegrationError::Invalid("non-finite start".into()));
    }
    sample(p, 0.0, start.to_array(), t_span, dt, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burster::integrator::integrate_to;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rhs_examples() {
        let p = BursterParams::new(0.08, 0.002, 0.3, 0.5).unwrap();
        let d = rhs(BursterState::new(0.0, 0.0, 0.0), &p);
        assert!((d[0] - 0.5).abs() < 1e-15);
        assert!((d[1] - 0.056).abs() < 1e-15);
        assert!((d[2] - 0.0006).abs() < 1e-15);
        let p = BursterParams::new(0.08, 0.002, 0.3, 0.0).unwrap();
        assert!((rhs(BursterState::new(1.0, 0.0, 0.0), &p)[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = BursterParams::new(rng.gen_range(0.01..1.0), rng.gen_range(1e-4..0.1), rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)).unwrap();
            let s = [rng.gen_range(-2.5..2.5), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let j = jacobian(BursterState::from_array(s), &p);
            for col in 0..3 {
                let h = 1e-6;
                let mut sp = s;
                let mut sm = s;
                sp[col] += h;
                sm[col] -= h;
                let fp = rhs(BursterState::from_array(sp), &p);
                let fm = rhs(BursterState::from_array(sm), &p);
                for row in 0..3 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!((fd - j[row][col]).abs() <= 1e-6 * j[row][col].abs().max(1.0));
                }
            }
            let tr = j[0][0] + j[1][1] + j[2][2];
            assert!((tr - divergence(BursterState::from_array(s), &p)).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(BursterParams::new(0.0, 0.002, 0.0, 0.8).is_err());
        assert!(BursterParams::new(0.08, -1.0, 0.0, 0.8).is_err());
        let j = r#"{"delta":0.08,"mu_slow":0.0,"c":0.0,"I":0.8}"#;
        assert!(serde_json::from_str::<BursterParams>(j).is_err());
        let j = r#"{"delta":0.08,"mu_slow":0.002,"c":-1.2,"I":0.8}"#;
        assert_eq!(serde_json::from_str::<BursterParams>(j).unwrap(), BursterParams::with_c(-1.2));
    }

    #[test]
    fn equilibrium_seed_stays_put() {
        let p = BursterParams::with_c(-1.6);
        let eq = super::super::fast::slow_nullcline_position(&p).equilibrium;
        let y = integrate_to(&p, 0.0, eq.to_array(), 100.0, IntegratorOptions::default()).unwrap();
        for (a, b) in y.iter().zip(eq.to_array()) {
            // rounding noise of 1e-16 is amplified while steps are far outside the stability region
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn rtol_halving_self_convergence() {
        let p = BursterParams::with_c(-1.3);
        let s = standard_seed(&p).to_array();
        let a = integrate_to(&p, 0.0, s, 1000.0, IntegratorOptions::with_tolerances(1e-9, 1e-11)).unwrap();
        let b = integrate_to(&p, 0.0, s, 1000.0, IntegratorOptions::with_tolerances(5e-10, 5e-12)).unwrap();
        let d = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!(d < 10.0 * 1e-9, "{d}");
    }
}
