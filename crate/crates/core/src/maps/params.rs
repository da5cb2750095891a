//! Parameter records for the local and global maps.

use super::point::reduce_angle;
use super::MapError;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

/// Linearization rates at the saddle-focus: expansion `rho`, contraction
/// `lambda` and rotation `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSaddleFocus")]
pub struct SaddleFocusParams {
    rho: f64,
    lambda: f64,
    omega: f64,
}

#[derive(Deserialize)]
struct RawSaddleFocus {
    rho: f64,
    lambda: f64,
    omega: f64,
}

impl TryFrom<RawSaddleFocus> for SaddleFocusParams {
    type Error = MapError;
    fn try_from(raw: RawSaddleFocus) -> Result<Self, Self::Error> {
        Self::new(raw.rho, raw.lambda, raw.omega)
    }
}

impl SaddleFocusParams {
    /// Validated constructor: requires a saddle index `lambda / rho > 1`.
    pub fn new(rho: f64, lambda: f64, omega: f64) -> Result<Self, MapError> {
        let p = Self::relaxed(rho, lambda, omega)?;
        if p.saddle_index() <= 1.0 {
            return Err(MapError::invalid(
                "lambda",
                format!("saddle index lambda/rho = {} must exceed 1", p.saddle_index()),
            ));
        }
        Ok(p)
    }

    /// Positivity checks only. Meant for exercising the linear flow with
    /// `nu <= 1`; the analysis routines reject such records.
    pub fn relaxed(rho: f64, lambda: f64, omega: f64) -> Result<Self, MapError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(MapError::invalid("rho", format!("{rho} is not > 0")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(MapError::invalid("lambda", format!("{lambda} is not > 0")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(MapError::invalid("omega", format!("{omega} is not >= 0")));
        }
        Ok(Self { rho, lambda, omega })
    }

    /// Convenience constructor from `nu` and `omega / rho` with `rho = 1`.
    pub fn from_ratios(nu: f64, omega_over_rho: f64) -> Result<Self, MapError> {
        Self::new(1.0, nu, omega_over_rho)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `nu = lambda / rho`.
    pub fn saddle_index(&self) -> f64 {
        self.lambda / self.rho
    }

    pub fn omega_over_rho(&self) -> f64 {
        self.omega / self.rho
    }

    pub(crate) fn require_contracting(&self) -> Result<(), MapError> {
        if self.saddle_index() > 1.0 {
            Ok(())
        } else {
            Err(MapError::invalid(
                "lambda",
                format!("saddle index {} <= 1 is only allowed for the flow oracle", self.saddle_index()),
            ))
        }
    }
}

/// Serializable description of a modulation profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileShape {
    /// `alpha = 1 + a sin(phi)`, `beta = 0`.
    Sine { a: f64 },
    /// `alpha = exp(-s sin(phi))`, `beta = 0`. With this profile the term
    /// `(omega/rho) ln(1/alpha)` equals `(omega/rho) s sin(phi)`, which turns the
    /// n = 0 singular limit into the sine model map.
    ExpSine { s: f64 },
    /// User-supplied closures; not serializable beyond the tag.
    Custom,
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
struct CustomFns {
    alpha: ScalarFn,
    alpha_prime: ScalarFn,
    beta: ScalarFn,
    beta_prime: ScalarFn,
}

/// The 2π-periodic pair `alpha(phi) > 0`, `beta(phi)` of the global map,
/// together with their analytic derivatives.
#[derive(Clone)]
pub struct ModulationProfile {
    shape: ProfileShape,
    custom: Option<CustomFns>,
    alpha_min: f64,
    alpha_max: f64,
}

impl fmt::Debug for ModulationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulationProfile")
            .field("shape", &self.shape)
            .field("alpha_min", &self.alpha_min)
            .field("alpha_max", &self.alpha_max)
            .finish()
    }
}

pub const DEFAULT_PROFILE_GRID: usize = 4096;
const DERIVATIVE_SAMPLES: usize = 64;
const DERIVATIVE_RTOL: f64 = 1e-6;

impl ModulationProfile {
    /// The canonical family `alpha = 1 + a sin(phi)`, `beta = 0`, for `|a| < 1`.
    pub fn sine(a: f64) -> Result<Self, MapError> {
        if !(a.is_finite() && a.abs() < 1.0) {
            return Err(MapError::invalid("a", format!("|a| = {} must be < 1 to keep alpha > 0", a.abs())));
        }
        Ok(Self {
            shape: ProfileShape::Sine { a },
            custom: None,
            alpha_min: 1.0 - a.abs(),
            alpha_max: 1.0 + a.abs(),
        })
    }

    /// `alpha = 1`, `beta = 0`.
    pub fn constant() -> Self {
        Self::sine(0.0).expect("a = 0 is valid")
    }

    pub fn exp_sine(s: f64) -> Result<Self, MapError> {
        if !s.is_finite() {
            return Err(MapError::invalid("s", "must be finite".into()));
        }
        Ok(Self {
            shape: ProfileShape::ExpSine { s },
            custom: None,
            alpha_min: (-s.abs()).exp(),
            alpha_max: s.abs().exp(),
        })
    }

    pub fn from_shape(shape: ProfileShape) -> Result<Self, MapError> {
        match shape {
            ProfileShape::Sine { a } => Self::sine(a),
            ProfileShape::ExpSine { s } => Self::exp_sine(s),
            ProfileShape::Custom => Err(MapError::invalid(
                "profile",
                "custom profiles must be built from closures".into(),
            )),
        }
    }

    /// A user profile. Closures are always evaluated at `phi mod 2π`.
    /// `alpha > 0` is checked on a uniform grid of `grid` phases and both
    /// analytic derivatives are compared against central differences.
    pub fn custom<A, AP, B, BP>(
        alpha: A,
        alpha_prime: AP,
        beta: B,
        beta_prime: BP,
        grid: usize,
    ) -> Result<Self, MapError>
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        AP: Fn(f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64) -> f64 + Send + Sync + 'static,
        BP: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if grid < 16 {
            return Err(MapError::invalid("grid", format!("{grid} phases is too coarse")));
        }
        let fns = CustomFns {
            alpha: Arc::new(alpha),
            alpha_prime: Arc::new(alpha_prime),
            beta: Arc::new(beta),
            beta_prime: Arc::new(beta_prime),
        };
        let mut alpha_min = f64::INFINITY;
        let mut alpha_max = f64::NEG_INFINITY;
        for j in 0..grid {
            let phi = TAU * j as f64 / grid as f64;
            let a = (fns.alpha)(phi);
            if !(a.is_finite() && a > 0.0) {
                return Err(MapError::invalid(
                    "alpha",
                    format!("alpha({phi:.6}) = {a} is not positive"),
                ));
            }
            alpha_min = alpha_min.min(a);
            alpha_max = alpha_max.max(a);
        }
        check_derivative("alpha_prime", &*fns.alpha, &*fns.alpha_prime)?;
        check_derivative("beta_prime", &*fns.beta, &*fns.beta_prime)?;
        Ok(Self {
            shape: ProfileShape::Custom,
            custom: Some(fns),
            alpha_min,
            alpha_max,
        })
    }

    pub fn shape(&self) -> ProfileShape {
        self.shape
    }

    /// Minimum of alpha (exact for built-in shapes, grid value for custom ones).
    pub fn alpha_min(&self) -> f64 {
        self.alpha_min
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    pub fn alpha(&self, phi: f64) -> f64 {
        match (&self.shape, &self.custom) {
            (ProfileShape::Sine { a }, _) => 1.0 + a * phi.sin(),
            (ProfileShape::ExpSine { s }, _) => (-s * phi.sin()).exp(),
            (_, Some(c)) => (c.alpha)(reduce_angle(phi)),
            _ => unreachable!("custom profile without closures"),
        }
    }

    pub fn alpha_prime(&self, phi: f64) -> f64 {
        match (&self.shape, &self.custom) {
            (ProfileShape::Sine { a }, _) => a * phi.cos(),
            (ProfileShape::ExpSine { s }, _) => -s * phi.cos() * (-s * phi.sin()).exp(),
            (_, Some(c)) => (c.alpha_prime)(reduce_angle(phi)),
            _ => unreachable!("custom profile without closures"),
        }
    }

    pub fn beta(&self, phi: f64) -> f64 {
        match (&self.shape, &self.custom) {
            (ProfileShape::Sine { .. } | ProfileShape::ExpSine { .. }, _) => 0.0,
            (_, Some(c)) => (c.beta)(reduce_angle(phi)),
            _ => unreachable!("custom profile without closures"),
        }
    }

    pub fn beta_prime(&self, phi: f64) -> f64 {
        match (&self.shape, &self.custom) {
            (ProfileShape::Sine { .. } | ProfileShape::ExpSine { .. }, _) => 0.0,
            (_, Some(c)) => (c.beta_prime)(reduce_angle(phi)),
            _ => unreachable!("custom profile without closures"),
        }
    }

    /// `alpha'(phi) / alpha(phi)`.
    pub fn log_derivative(&self, phi: f64) -> f64 {
        self.alpha_prime(phi) / self.alpha(phi)
    }
}

fn check_derivative(
    name: &'static str,
    f: &(dyn Fn(f64) -> f64 + Send + Sync),
    df: &(dyn Fn(f64) -> f64 + Send + Sync),
) -> Result<(), MapError> {
    let h = 1e-5;
    for k in 0..DERIVATIVE_SAMPLES {
        // offset so samples do not sit on symmetric points of common profiles
        let phi = TAU * (k as f64 + 0.37) / DERIVATIVE_SAMPLES as f64;
        let fd = (f(reduce_angle(phi + h)) - f(reduce_angle(phi - h))) / (2.0 * h);
        let exact = df(phi);
        if (fd - exact).abs() > DERIVATIVE_RTOL * exact.abs().max(1.0) {
            return Err(MapError::invalid(
                name,
                format!("derivative {exact} disagrees with finite difference {fd} at phi = {phi:.6}"),
            ));
        }
    }
    Ok(())
}

/// Degree of the angular part of the global map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Winding {
    Zero = 0,
    One = 1,
}

impl Winding {
    pub fn as_f64(self) -> f64 {
        match self {
            Winding::Zero => 0.0,
            Winding::One => 1.0,
        }
    }
}

impl TryFrom<u8> for Winding {
    type Error = MapError;
    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            0 => Ok(Winding::Zero),
            1 => Ok(Winding::One),
            other => Err(MapError::invalid("n", format!("winding number must be 0 or 1, got {other}"))),
        }
    }
}

impl From<Winding> for u8 {
    fn from(w: Winding) -> u8 {
        match w {
            Winding::Zero => 0,
            Winding::One => 1,
        }
    }
}

/// Global map configuration. The neglected `O(z)` terms of the global map
/// are modelled as linear couplings `eps_r * z` and `eps_phi * z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalMapConfig {
    pub mu: f64,
    pub phi_star: f64,
    pub n: Winding,
    pub eps_r: f64,
    pub eps_phi: f64,
    /// Height of the exit cylinder in original coordinates.
    pub z_max: f64,
}

pub const DEFAULT_EPS_R: f64 = 0.1;
pub const DEFAULT_EPS_PHI: f64 = 0.0;

impl GlobalMapConfig {
    /// Validated constructor with the default couplings and `z_max = 1`.
    pub fn new(mu: f64, phi_star: f64, n: Winding, profile: &ModulationProfile) -> Result<Self, MapError> {
        Self::with_coupling(mu, phi_star, n, DEFAULT_EPS_R, DEFAULT_EPS_PHI, profile)
    }

    pub fn with_coupling(
        mu: f64,
        phi_star: f64,
        n: Winding,
        eps_r: f64,
        eps_phi: f64,
        profile: &ModulationProfile,
    ) -> Result<Self, MapError> {
        let cfg = Self {
            mu,
            phi_star: reduce_angle(phi_star),
            n,
            eps_r,
            eps_phi,
            z_max: 1.0,
        };
        cfg.validate(profile)?;
        Ok(cfg)
    }

    pub fn with_z_max(mut self, z_max: f64, profile: &ModulationProfile) -> Result<Self, MapError> {
        self.z_max = z_max;
        self.validate(profile)?;
        Ok(self)
    }

    /// Checks that every return lands strictly inside the disk section and
    /// that the unstable manifold never returns onto the stable one.
    pub fn validate(&self, profile: &ModulationProfile) -> Result<(), MapError> {
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(MapError::invalid("mu", format!("{} is not >= 0", self.mu)));
        }
        if !(self.eps_r.is_finite() && self.eps_r >= 0.0) {
            return Err(MapError::invalid("eps_r", format!("{} is not >= 0", self.eps_r)));
        }
        if !self.eps_phi.is_finite() || !self.phi_star.is_finite() {
            return Err(MapError::invalid("eps_phi", "must be finite".into()));
        }
        if !(self.z_max.is_finite() && self.z_max > 0.0) {
            return Err(MapError::invalid("z_max", format!("{} is not > 0", self.z_max)));
        }
        let r_max = self.mu * profile.alpha_max() + self.eps_r * self.z_max;
        if r_max >= 1.0 {
            return Err(MapError::invalid(
                "mu",
                format!("mu*max(alpha) + eps_r*z_max = {r_max} must stay below 1"),
            ));
        }
        if self.mu > 0.0 && self.mu * profile.alpha_min() <= 0.0 {
            return Err(MapError::invalid("mu", "mu*min(alpha) must be positive".into()));
        }
        Ok(())
    }

    /// The lower bound `mu * min(alpha)` on the return radius of the
    /// unstable manifold; positive means no homoclinic loop.
    pub fn homoclinic_clearance(&self, profile: &ModulationProfile) -> f64 {
        self.mu * profile.alpha_min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_index_must_exceed_one() {
        assert!(SaddleFocusParams::new(1.0, 1.0, 1.0).is_err());
        assert!(SaddleFocusParams::new(1.0, 0.5, 1.0).is_err());
        assert!(SaddleFocusParams::relaxed(1.0, 0.5, 1.0).is_ok());
        let p = SaddleFocusParams::new(2.0, 3.0, 1.0).unwrap();
        assert_eq!(p.saddle_index(), 1.5);
        assert_eq!(p.omega_over_rho(), 0.5);
    }

    #[test]
    fn rejects_nonpositive_rates() {
        assert!(SaddleFocusParams::relaxed(0.0, 1.0, 1.0).is_err());
        assert!(SaddleFocusParams::relaxed(1.0, -1.0, 1.0).is_err());
        assert!(SaddleFocusParams::relaxed(1.0, 1.0, -0.1).is_err());
        assert!(SaddleFocusParams::relaxed(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn params_deserialize_through_validation() {
        let ok: SaddleFocusParams = serde_json::from_str(r#"{"rho":1,"lambda":2,"omega":3}"#).unwrap();
        assert_eq!(ok.saddle_index(), 2.0);
        assert!(serde_json::from_str::<SaddleFocusParams>(r#"{"rho":1,"lambda":0.5,"omega":3}"#).is_err());
    }

    #[test]
    fn sine_profile_bounds() {
        assert!(ModulationProfile::sine(1.0).is_err());
        let p = ModulationProfile::sine(0.3).unwrap();
        assert!((p.alpha_min() - 0.7).abs() < 1e-15);
        assert!((p.alpha(std::f64::consts::FRAC_PI_2) - 1.3).abs() < 1e-15);
        assert!((p.alpha_prime(0.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn custom_profile_validation() {
        let ok = ModulationProfile::custom(
            |p| 2.0 + p.cos(),
            |p| -p.sin(),
            |p| 0.1 * (2.0 * p).sin(),
            |p| 0.2 * (2.0 * p).cos(),
            DEFAULT_PROFILE_GRID,
        );
        assert!(ok.is_ok());
        let p = ok.unwrap();
        assert!((p.alpha_min() - 1.0).abs() < 1e-6);
        assert!((p.alpha(TAU + 0.4) - p.alpha(0.4)).abs() == 0.0);

        let negative = ModulationProfile::custom(|p| p.sin(), |p| p.cos(), |_| 0.0, |_| 0.0, 256);
        assert!(negative.is_err());

        let wrong_derivative = ModulationProfile::custom(|p| 2.0 + p.cos(), |p| p.sin(), |_| 0.0, |_| 0.0, 256);
        assert!(wrong_derivative.is_err());
    }

    #[test]
    fn winding_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Winding::One).unwrap(), "1");
        assert_eq!(serde_json::from_str::<Winding>("0").unwrap(), Winding::Zero);
        assert!(serde_json::from_str::<Winding>("2").is_err());
    }

    #[test]
    fn config_keeps_returns_inside_the_disk() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        assert!(GlobalMapConfig::new(0.01, 0.0, Winding::One, &prof).is_ok());
        // 0.8 * 1.3 + 0.1 > 1
        assert!(GlobalMapConfig::new(0.8, 0.0, Winding::One, &prof).is_err());
        assert!(GlobalMapConfig::with_coupling(0.01, 0.0, Winding::One, -0.1, 0.0, &prof).is_err());
        let cfg = GlobalMapConfig::new(0.01, 7.0, Winding::Zero, &prof).unwrap();
        assert!((cfg.phi_star - (7.0 - TAU)).abs() < 1e-12);
        assert!(cfg.homoclinic_clearance(&prof) > 0.0);
    }
}
