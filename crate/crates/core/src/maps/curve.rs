//! Periodic cubic splines and sampled invariant graphs `z = h(φ)`.

use super::MapError;
use std::f64::consts::TAU;

/// Periodic cubic spline through `(x_i, y_i)` with period `period`.
/// Knots must be strictly increasing and span less than one period.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    period: f64,
}

impl PeriodicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, period: f64) -> Result<Self, MapError> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(MapError::invalid("knots", format!("need >= 3 matching knots, got {n}/{}", y.len())));
        }
        if !(period > 0.0) {
            return Err(MapError::invalid("period", format!("{period} is not > 0")));
        }
        for i in 0..n - 1 {
            if !(x[i + 1] > x[i]) {
                return Err(MapError::invalid(
                    "knots",
                    format!("not strictly increasing on [{}, {}]", x[i], x[i + 1]),
                ));
            }
        }
        if !(x[n - 1] - x[0] < period) {
            return Err(MapError::invalid("knots", "span exceeds one period".into()));
        }
        let h: Vec<f64> = (0..n)
            .map(|i| if i + 1 < n { x[i + 1] - x[i] } else { x[0] + period - x[n - 1] })
            .collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            sub[i] = h[im];
            diag[i] = 2.0 * (h[im] + h[i]);
            sup[i] = h[i];
            rhs[i] = 6.0 * ((y[ip] - y[i]) / h[i] - (y[i] - y[im]) / h[im]);
        }
        let m = solve_cyclic(&sub, &diag, &sup, &rhs);
        Ok(Self { x, y, m, period })
    }

    fn locate(&self, t: f64) -> (usize, f64, f64) {
        let n = self.x.len();
        let x0 = self.x[0];
        let mut s = (t - x0).rem_euclid(self.period) + x0;
        if s >= x0 + self.period {
            s = x0;
        }
        // index of the last knot <= s
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let right = if i + 1 < n { self.x[i + 1] } else { x0 + self.period };
        (i, s, right - self.x[i])
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let (i, s, h) = self.locate(t);
        let j = (i + 1) % n;
        let a = (self.x[i] + h - s) / h;
        let b = 1.0 - a;
        a * self.y[i] + b * self.y[j] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[j]) * h * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let n = self.x.len();
        let (i, s, h) = self.locate(t);
        let j = (i + 1) % n;
        let a = (self.x[i] + h - s) / h;
        let b = 1.0 - a;
        (self.y[j] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i] + (3.0 * b * b - 1.0) / 6.0 * h * self.m[j]
    }
}

/// Solves a cyclic tridiagonal system. Row `i` reads
/// `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` with wrap-around indices.
fn solve_cyclic(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = sup[n - 1];
    let beta = sub[0];
    let gamma = -diag[0];
    let mut bb = diag.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(sub, &bb, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let zv = solve_tridiagonal(sub, &bb, sup, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + zv[0] + beta * zv[n - 1] / gamma);
    x.iter().zip(&zv).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / den;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// A graph `z = h(φ)` sampled at `φ_j = 2πj/N`, evaluated by periodic cubic
/// interpolation. For smooth `h` the interpolation error is `O(N^-4)`.
#[derive(Debug, Clone)]
pub struct CircleCurve {
    heights: Vec<f64>,
    spline: PeriodicSpline,
}

pub const DEFAULT_CURVE_GRID: usize = 1024;

impl CircleCurve {
    /// `heights.len()` must be a power of two, at least 4.
    pub fn new(heights: Vec<f64>) -> Result<Self, MapError> {
        let n = heights.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(MapError::invalid("grid", format!("size {n} is not a power of two >= 4")));
        }
        let spline = PeriodicSpline::new(Self::grid(n), heights.clone(), TAU)?;
        Ok(Self { heights, spline })
    }

    /// Samples `h` on the uniform grid of size `n`.
    pub fn from_fn(n: usize, h: impl Fn(f64) -> f64) -> Result<Self, MapError> {
        Self::new(Self::grid(n).into_iter().map(h).collect())
    }

    pub fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|j| TAU * j as f64 / n as f64).collect()
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn phases(&self) -> Vec<f64> {
        Self::grid(self.len())
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.spline.eval(phi)
    }

    pub fn deriv(&self, phi: f64) -> f64 {
        self.spline.deriv(phi)
    }

    /// `max_j |h_j - g_j|` on a shared grid.
    pub fn sup_distance(&self, other: &CircleCurve) -> f64 {
        self.heights
            .iter()
            .zip(other.heights())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_knots_and_is_periodic() {
        let x: Vec<f64> = (0..40).map(|i| TAU * (i as f64 + 0.3 * ((i * 7 % 5) as f64) / 5.0) / 40.0).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin() + 0.5 * (2.0 * t).cos()).collect();
        let s = PeriodicSpline::new(x.clone(), y.clone(), TAU).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-13);
        }
        for t in [0.1, 1.7, 4.4, 6.2] {
            assert!((s.eval(t) - s.eval(t + TAU)).abs() < 1e-13);
            assert!((s.eval(t) - (t.sin() + 0.5 * (2.0 * t).cos())).abs() < 1e-4);
        }
    }

    #[test]
    fn spline_rejects_unordered_knots() {
        assert!(PeriodicSpline::new(vec![0.0, 2.0, 1.0], vec![0.0; 3], TAU).is_err());
        assert!(PeriodicSpline::new(vec![0.0, 2.0, 7.0], vec![0.0; 3], TAU).is_err());
    }

    #[test]
    fn curve_interpolation_error_scales_like_n_to_minus_four() {
        let f = |t: f64| (t.sin()).exp();
        let err = |n: usize| {
            let c = CircleCurve::from_fn(n, f).unwrap();
            (0..997).map(|k| {
                let t = TAU * (k as f64 + 0.5) / 997.0;
                (c.eval(t) - f(t)).abs()
            })
            .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn curve_requires_power_of_two() {
        assert!(CircleCurve::new(vec![1.0; 100]).is_err());
        let c = CircleCurve::new(vec![1.0; 8]).unwrap();
        assert!((c.eval(3.3) - 1.0).abs() < 1e-15);
        assert_eq!(c.sup_distance(&c), 0.0);
    }
}
