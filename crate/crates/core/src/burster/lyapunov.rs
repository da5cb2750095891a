//! Lyapunov exponents of the burster flow by tangent-space integration
//! with periodic QR (Gram-Schmidt) renormalization.

use super::integrator::{integrate_to, IntegratorOptions, OdeSystem};
use super::model::{divergence, jacobian, rhs, BursterParams, BursterState};
use super::BursterError;
use serde::{Deserialize, Serialize};

/// Exponents with magnitude below this count as zero.
pub const ZERO_EXPONENT_TOL: f64 = 0.01;
/// Exponents below minus this count as negative. Slow exponents of the
/// burster are O(mu_slow), so a negative exponent may also lie in the zero band.
pub const NEGATIVE_EXPONENT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowLyapunovOptions {
    pub t_transient: f64,
    pub t_total: f64,
    pub renorm_interval: f64,
    pub integrator: IntegratorOptions,
}

impl Default for FlowLyapunovOptions {
    fn default() -> Self {
        Self {
            t_transient: 1e3,
            t_total: 1e4,
            renorm_interval: 10.0,
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowLyapunov {
    /// Sorted in decreasing order.
    pub exponents: [f64; 3],
    /// Time average of the Jacobian trace along the orbit.
    pub mean_divergence: f64,
    pub time: f64,
    pub final_state: BursterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentPattern {
    /// `(-, -, -)`
    Equilibrium,
    /// `(0, -, -)`
    Periodic,
    /// `(0, 0, -)`
    Torus,
    /// Leading exponent positive.
    Chaotic,
    Other,
}

impl ExponentPattern {
    /// Whether sorted exponents are compatible with this pattern. More than
    /// one pattern can match when a negative exponent sits in the zero band.
    pub fn matches(self, e: &[f64; 3]) -> bool {
        let zero = |x: f64| x.abs() < ZERO_EXPONENT_TOL;
        let neg = |x: f64| x < -NEGATIVE_EXPONENT_TOL;
        match self {
            ExponentPattern::Equilibrium => e.iter().all(|&x| neg(x)),
            ExponentPattern::Periodic => zero(e[0]) && neg(e[1]) && neg(e[2]),
            ExponentPattern::Torus => zero(e[0]) && zero(e[1]) && neg(e[2]),
            ExponentPattern::Chaotic => e[0] >= ZERO_EXPONENT_TOL,
            ExponentPattern::Other => true,
        }
    }
}

impl FlowLyapunov {
    pub fn pattern(&self) -> ExponentPattern {
        pattern_of(&self.exponents)
    }

    pub fn matches(&self, pattern: ExponentPattern) -> bool {
        pattern.matches(&self.exponents)
    }
}

/// The most specific matching pattern: a zero-band exponent counts as zero
/// unless it lies beyond the zero band.
pub fn pattern_of(e: &[f64; 3]) -> ExponentPattern {
    let beyond = |x: f64| x <= -ZERO_EXPONENT_TOL;
    if ExponentPattern::Chaotic.matches(e) {
        ExponentPattern::Chaotic
    } else if ExponentPattern::Periodic.matches(e) && beyond(e[1]) {
        ExponentPattern::Periodic
    } else if ExponentPattern::Torus.matches(e) {
        ExponentPattern::Torus
    } else if ExponentPattern::Periodic.matches(e) {
        ExponentPattern::Periodic
    } else if ExponentPattern::Equilibrium.matches(e) {
        ExponentPattern::Equilibrium
    } else {
        ExponentPattern::Other
    }
}

/// State, three tangent vectors (columns) and the integrated trace.
struct Tangent<'a>(&'a BursterParams);

impl OdeSystem<13> for Tangent<'_> {
    fn rhs(&self, _t: f64, x: &[f64; 13], dx: &mut [f64; 13]) {
        let s = BursterState::new(x[0], x[1], x[2]);
        let f = rhs(s, self.0);
        dx[..3].copy_from_slice(&f);
        let j = jacobian(s, self.0);
        for col in 0..3 {
            for row in 0..3 {
                dx[3 + 3 * col + row] = (0..3).map(|k| j[row][k] * x[3 + 3 * col + k]).sum();
            }
        }
        dx[12] = divergence(s, self.0);
    }
}

/// Benettin's method: after `t_transient`, integrates the variational
/// equations for `t_total` and re-orthonormalizes every `renorm_interval`.
pub fn flow_lyapunov(start: BursterState, p: &BursterParams, o: &FlowLyapunovOptions) -> Result<FlowLyapunov, BursterError> {
    if o.t_total < 1e4 {
        return Err(BursterError::invalid("t_total", format!("must be at least 1e4, got {}", o.t_total)));
    }
    if !(o.renorm_interval > 0.0) || o.t_transient < 0.0 {
        return Err(BursterError::invalid("renorm_interval", "must be positive".into()));
    }
    let mut x0 = start.to_array();
    if o.t_transient > 0.0 {
        x0 = integrate_to(p, 0.0, x0, o.t_transient, o.integrator)?;
    }
    let mut x = [0.0; 13];
    x[..3].copy_from_slice(&x0);
    for k in 0..3 {
        x[3 + 4 * k] = 1.0;
    }
    let sys = Tangent(p);
    let opts = IntegratorOptions {
        divergence_bound: f64::INFINITY,
        ..o.integrator
    };
    let n = (o.t_total / o.renorm_interval).ceil() as usize;
    let dt = o.t_total / n as f64;
    let mut sums = [0.0; 3];
    for _ in 0..n {
        x = integrate_to(&sys, 0.0, x, dt, opts)?;
        if x[..3].iter().any(|v| v.abs() > o.integrator.divergence_bound) {
            return Err(BursterError::Integration(super::IntegrationError::Divergence {
                t: 0.0,
                bound: o.integrator.divergence_bound,
            }));
        }
        // modified Gram-Schmidt on the columns
        let mut q = [[0.0; 3]; 3];
        for c in 0..3 {
            let mut v = [x[3 + 3 * c], x[4 + 3 * c], x[5 + 3 * c]];
            for prev in q.iter().take(c) {
                let d: f64 = (0..3).map(|i| v[i] * prev[i]).sum();
                for i in 0..3 {
                    v[i] -= d * prev[i];
                }
            }
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            sums[c] += norm.ln();
            q[c] = [v[0] / norm, v[1] / norm, v[2] / norm];
        }
        for c in 0..3 {
            x[3 + 3 * c..6 + 3 * c].copy_from_slice(&q[c]);
        }
    }
    let mut exponents = sums.map(|s| s / o.t_total);
    exponents.sort_by(|a, b| b.total_cmp(a));
    Ok(FlowLyapunov {
        exponents,
        mean_divergence: x[12] / o.t_total,
        time: o.t_total,
        final_state: BursterState::new(x[0], x[1], x[2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burster::fast::slow_nullcline_position;

    #[test]
    fn equilibrium_exponents_match_eigenvalues() {
        let p = BursterParams::with_c(-1.6);
        let r = slow_nullcline_position(&p);
        let start = BursterState::new(r.equilibrium.v + 0.05, r.equilibrium.w, r.equilibrium.y);
        let l = flow_lyapunov(start, &p, &FlowLyapunovOptions::default()).unwrap();
        // the slow eigenvalue is O(mu_slow), inside the zero tolerance
        assert!(l.exponents.iter().all(|&e| e < 0.0), "{:?}", l.exponents);
        let mut re: Vec<f64> = r.eigenvalues.iter().map(|e| e.0).collect();
        re.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in l.exponents.iter().zip(&re) {
            assert!((a - b).abs() < 0.01, "{:?} vs {re:?}", l.exponents);
        }
        let sum: f64 = l.exponents.iter().sum();
        assert!((sum - l.mean_divergence).abs() < 0.01);
    }

    #[test]
    fn patterns() {
        assert_eq!(pattern_of(&[0.001, -0.2, -1.0]), ExponentPattern::Periodic);
        let slow = [0.0002, -0.005, -0.5];
        assert!(ExponentPattern::Periodic.matches(&slow) && ExponentPattern::Torus.matches(&slow));
        assert!(!ExponentPattern::Torus.matches(&[0.0002, -0.0001, -0.0005]));
        assert_eq!(pattern_of(&[0.001, -0.002, -1.0]), ExponentPattern::Torus);
        assert_eq!(pattern_of(&[0.05, 0.0, -1.0]), ExponentPattern::Chaotic);
        assert_eq!(pattern_of(&[-0.1, -0.2, -1.0]), ExponentPattern::Equilibrium);
    }

    #[test]
    fn short_runs_are_rejected() {
        let p = BursterParams::with_c(-1.6);
        let o = FlowLyapunovOptions {
            t_total: 100.0,
            ..FlowLyapunovOptions::default()
        };
        assert!(flow_lyapunov(BursterState::new(0.0, 0.0, 0.0), &p, &o).is_err());
    }
}
