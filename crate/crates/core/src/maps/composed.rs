//! Annulus maps built from `T0` and `T1`, and the circle maps they induce.

use super::global::global_map_t1;
use super::local::local_map_t0;
use super::params::{GlobalMapConfig, ModulationProfile, SaddleFocusParams, Winding};
use super::point::LiftedPoint;
use super::MapError;
use nalgebra::Matrix2;

/// A map of the annulus `(z, phi)` acting on lifted angles.
///
/// Jacobian rows are `(z̄, φ̄)`, columns `(z, φ)`.
pub trait AnnulusMap: Send + Sync {
    fn apply(&self, p: LiftedPoint) -> Result<LiftedPoint, MapError>;
    fn jacobian(&self, p: LiftedPoint) -> Result<Matrix2<f64>, MapError>;
    /// Degree of the angular component: `F(φ + 2π) = F(φ) + 2π·degree`.
    fn degree(&self) -> i32;
}

/// A circle map given through a lift `F: R -> R` with `F(φ + 2π) = F(φ) + 2π·degree`.
pub trait LiftedCircleMap: Send + Sync {
    fn lift(&self, phi: f64) -> f64;
    fn deriv(&self, phi: f64) -> f64;
    fn degree(&self) -> i32;
}

impl<M: LiftedCircleMap + ?Sized> LiftedCircleMap for &M {
    fn lift(&self, phi: f64) -> f64 {
        (**self).lift(phi)
    }
    fn deriv(&self, phi: f64) -> f64 {
        (**self).deriv(phi)
    }
    fn degree(&self) -> i32 {
        (**self).degree()
    }
}

impl<M: LiftedCircleMap + ?Sized> LiftedCircleMap for Box<M> {
    fn lift(&self, phi: f64) -> f64 {
        (**self).lift(phi)
    }
    fn deriv(&self, phi: f64) -> f64 {
        (**self).deriv(phi)
    }
    fn degree(&self) -> i32 {
        (**self).degree()
    }
}

impl<M: AnnulusMap + ?Sized> AnnulusMap for Box<M> {
    fn apply(&self, p: LiftedPoint) -> Result<LiftedPoint, MapError> {
        (**self).apply(p)
    }
    fn jacobian(&self, p: LiftedPoint) -> Result<Matrix2<f64>, MapError> {
        (**self).jacobian(p)
    }
    fn degree(&self) -> i32 {
        (**self).degree()
    }
}

impl<M: AnnulusMap + ?Sized> AnnulusMap for &M {
    fn apply(&self, p: LiftedPoint) -> Result<LiftedPoint, MapError> {
        (**self).apply(p)
    }
    fn jacobian(&self, p: LiftedPoint) -> Result<Matrix2<f64>, MapError> {
        (**self).jacobian(p)
    }
    fn degree(&self) -> i32 {
        (**self).degree()
    }
}

/// `omega_tilde(mu) = (omega/rho) ln(1/mu) + phi*`, the phase shift produced
/// by the composition. Not reduced mod 2π.
pub fn omega_tilde(p: &SaddleFocusParams, mu: f64, phi_star: f64) -> Result<f64, MapError> {
    if !(mu > 0.0) {
        return Err(MapError::ZeroMu);
    }
    Ok(-p.omega_over_rho() * mu.ln() + phi_star)
}

/// The full return map `T = T0 ∘ T1` in original coordinates.
#[derive(Debug, Clone)]
pub struct FullMap {
    pub params: SaddleFocusParams,
    pub profile: ModulationProfile,
    pub cfg: GlobalMapConfig,
}

impl FullMap {
    pub fn new(params: SaddleFocusParams, profile: ModulationProfile, cfg: GlobalMapConfig) -> Result<Self, MapError> {
        params.require_contracting()?;
        cfg.validate(&profile)?;
        Ok(Self { params, profile, cfg })
    }
}

impl AnnulusMap for FullMap {
    fn apply(&self, p: LiftedPoint) -> Result<LiftedPoint, MapError> {
        local_map_t0(global_map_t1(p, &self.profile, &self.cfg)?, &self.params)
    }

    fn jacobian(&self, p: LiftedPoint) -> Result<Matrix2<f64>, MapError> {
        let d = global_map_t1(p, &self.profile, &self.cfg)?;
        let (mu, phi) = (self.cfg.mu, p.phi_lift);
        let nu = self.params.saddle_index();
        let k = self.params.omega_over_rho();
        let r0 = d.r;
        // chain rule through r0(z, phi) and phi0(z, phi)
        let (dr_dz, dr_dphi) = (self.cfg.eps_r, mu * self.profile.alpha_prime(phi));
        let (dp_dz, dp_dphi) = (
            self.cfg.eps_phi,
            self.cfg.n.as_f64() + mu * self.profile.beta_prime(phi),
        );
        let s = nu * r0.powf(nu - 1.0);
        Ok(Matrix2::new(
            s * dr_dz,
            s * dr_dphi,
            dp_dz - k * dr_dz / r0,
            dp_dphi - k * dr_dphi / r0,
        ))
    }

    fn degree(&self) -> i32 {
        self.cfg.n as i32
    }
}

/// The full map in the rescaled height `ζ = z / mu^nu`. The formulas are the
/// exact conjugate of [`FullMap`], with `q = alpha(φ) + eps_r mu^(nu-1) ζ`:
/// `ζ̄ = q^nu`, `φ̄ = nφ + ω̃(mu) + (omega/rho) ln(1/q) + mu beta(φ) + eps_phi mu^nu ζ`.
#[derive(Debug, Clone)]
pub struct RescaledMap {
    pub params: SaddleFocusParams,
    pub profile: ModulationProfile,
    pub cfg: GlobalMapConfig,
    omega_tilde: f64,
    mu_nu: f64,
    mu_nu1: f64,
}

impl RescaledMap {
    pub fn new(params: SaddleFocusParams, profile: ModulationProfile, cfg: GlobalMapConfig) -> Result<Self, MapError> {
        params.require_contracting()?;
        cfg.validate(&profile)?;
        if !(cfg.mu > 0.0) {
            return Err(MapError::ZeroMu);
        }
        let nu = params.saddle_index();
        Ok(Self {
            omega_tilde: omega_tilde(&params, cfg.mu, cfg.phi_star)?,
            mu_nu: cfg.mu.powf(nu),
            mu_nu1: cfg.mu.powf(nu - 1.0),
            params,
            profile,
            cfg,
        })
    }

    pub fn omega_tilde(&self) -> f64 {
        self.omega_tilde
    }

    /// Original height to rescaled height.
    pub fn rescale(&self, z: f64) -> f64 {
        z / self.mu_nu
    }

    /// Rescaled height to original height.
    pub fn unscale(&self, zeta: f64) -> f64 {
        zeta * self.mu_nu
    }

    /// Default rescaled domain height `2 max alpha^nu`.
    pub fn zeta_max(&self) -> f64 {
        2.0 * self.profile.alpha_max().powf(self.params.saddle_index())
    }

    fn q(&self, p: LiftedPoint) -> Result<f64, MapError> {
        if p.z < 0.0 {
            return Err(MapError::NegativeHeight { z: p.z });
        }
        let q = self.profile.alpha(p.phi_lift) + self.cfg.eps_r * self.mu_nu1 * p.z;
        let r0 = self.cfg.mu * q;
        if !(r0 < 1.0) {
            return Err(MapError::Range { r0 });
        }
        Ok(q)
    }

    /// The singular limit with the same profile, `n` and `ω̃(mu)`.
    pub fn singular_limit(&self) -> SingularLimitMap {
        SingularLimitMap {
            params: self.params,
            profile: self.profile.clone(),
            omega_tilde: self.omega_tilde,
            n: self.cfg.n,
        }
    }
}

impl AnnulusMap for RescaledMap {
    fn apply(&self, p: LiftedPoint) -> Result<LiftedPoint, MapError> {
        let q = self.q(p)?;
        let phi = p.phi_lift;
        let nu = self.params.saddle_index();
        let k = self.params.omega_over_rho();
        let zbar = q.powf(nu);
        let phibar = self.cfg.n.as_f64() * phi + self.omega_tilde - k * q.ln()
            + self.cfg.mu * self.profile.beta(phi)
            + self.cfg.eps_phi * self.mu_nu * p.z;
        Ok(LiftedPoint::new(zbar, phibar))
    }

    fn jacobian(&self, p: LiftedPoint) -> Result<Matrix2<f64>, MapError> {
        let q = self.q(p)?;
        let phi = p.phi_lift;
        let nu = self.params.saddle_index();
        let k = self.params.omega_over_rho();
        let ap = self.profile.alpha_prime(phi);
        let s = nu * q.powf(nu - 1.0);
        let dq_dz = self.cfg.eps_r * self.mu_nu1;
        Ok(Matrix2::new(
            s * dq_dz,
            s * ap,
            self.cfg.eps_phi * self.mu_nu - k * dq_dz / q,
            self.cfg.n.as_f64() + self.cfg.mu * self.profile.beta_prime(phi) - k * ap / q,
        ))
    }

    fn degree(&self) -> i32 {
        self.cfg.n as i32
    }
}

/// The `mu -> 0` limit of [`RescaledMap`] with `ω̃` as a free parameter:
/// `ζ̄ = alpha(φ)^nu`, `φ̄ = nφ + (omega/rho) ln(1/alpha(φ)) + ω̃`.
#[derive(Debug, Clone)]
pub struct SingularLimitMap {
    pub params: SaddleFocusParams,
    pub profile: ModulationProfile,
    pub omega_tilde: f64,
    pub n: Winding,
}

impl SingularLimitMap {
    pub fn new(params: SaddleFocusParams, profile: ModulationProfile, omega_tilde: f64, n: Winding) -> Result<Self, MapError> {
        params.require_contracting()?;
        if !omega_tilde.is_finite() {
            return Err(MapError::invalid("omega_tilde", "must be finite".into()));
        }
        Ok(Self {
            params,
            profile,
            omega_tilde,
            n,
        })
    }

    /// The angular component, which does not depend on the height.
    pub fn circle_component(&self) -> CircleMap {
        CircleMap {
            k: self.params.omega_over_rho(),
            profile: self.profile.clone(),
            omega_tilde: self.omega_tilde,
            n: self.n,
        }
    }

    /// Height of the image, `alpha(φ)^nu`.
    pub fn height(&self, phi: f64) -> f64 {
        self.profile.alpha(phi).powf(self.params.saddle_index())
    }
}

impl AnnulusMap for SingularLimitMap {
    fn apply(&self, p: LiftedPoint) -> Result<LiftedPoint, MapError> {
        let phi = p.phi_lift;
        let a = self.profile.alpha(phi);
        let k = self.params.omega_over_rho();
        Ok(LiftedPoint::new(
            a.powf(self.params.saddle_index()),
            self.n.as_f64() * phi - k * a.ln() + self.omega_tilde,
        ))
    }

    fn jacobian(&self, p: LiftedPoint) -> Result<Matrix2<f64>, MapError> {
        let phi = p.phi_lift;
        let a = self.profile.alpha(phi);
        let ap = self.profile.alpha_prime(phi);
        let nu = self.params.saddle_index();
        let k = self.params.omega_over_rho();
        Ok(Matrix2::new(
            0.0,
            nu * a.powf(nu - 1.0) * ap,
            0.0,
            self.n.as_f64() - k * ap / a,
        ))
    }

    fn degree(&self) -> i32 {
        self.n as i32
    }
}

/// `φ̄ = nφ + k ln(1/alpha(φ)) + ω̃` with `k = omega/rho`.
#[derive(Debug, Clone)]
pub struct CircleMap {
    pub k: f64,
    pub profile: ModulationProfile,
    pub omega_tilde: f64,
    pub n: Winding,
}

impl CircleMap {
    /// The degree-one circle map of the `n = 1` singular limit.
    pub fn new(params: &SaddleFocusParams, profile: ModulationProfile, omega_tilde: f64) -> Self {
        Self {
            k: params.omega_over_rho(),
            profile,
            omega_tilde,
            n: Winding::One,
        }
    }

    /// Reduced image and lift increment `F(φ) - φ`.
    pub fn image(&self, phi: f64) -> (f64, f64) {
        let f = self.lift(phi);
        (super::point::reduce_angle(f), f - phi)
    }
}

impl LiftedCircleMap for CircleMap {
    fn lift(&self, phi: f64) -> f64 {
        self.n.as_f64() * phi - self.k * self.profile.alpha(phi).ln() + self.omega_tilde
    }

    fn deriv(&self, phi: f64) -> f64 {
        self.n.as_f64() - self.k * self.profile.log_derivative(phi)
    }

    fn degree(&self) -> i32 {
        self.n as i32
    }
}

/// `φ̄ = A sin φ + ω̃`, a degree-zero circle map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineCircleMap {
    pub amplitude: f64,
    pub omega_tilde: f64,
}

impl LiftedCircleMap for SineCircleMap {
    fn lift(&self, phi: f64) -> f64 {
        self.amplitude * phi.sin() + self.omega_tilde
    }

    fn deriv(&self, phi: f64) -> f64 {
        self.amplitude * phi.cos()
    }

    fn degree(&self) -> i32 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn sf(nu: f64, k: f64) -> SaddleFocusParams {
        SaddleFocusParams::from_ratios(nu, k).unwrap()
    }

    #[test]
    fn full_map_constant_profile_chain() {
        let prof = ModulationProfile::constant();
        let cfg = GlobalMapConfig::with_coupling(0.01, 0.0, Winding::One, 0.0, 0.0, &prof).unwrap();
        let m = FullMap::new(SaddleFocusParams::new(1.0, 2.0, 1.0).unwrap(), prof, cfg).unwrap();
        let out = m.apply(LiftedPoint::new(0.0, 0.0)).unwrap();
        assert!((out.z - 1e-4).abs() < 1e-18);
        assert!((out.phi_lift - 100f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn full_map_equals_two_step_evaluation() {
        let prof = ModulationProfile::sine(0.3).unwrap();
        let p = sf(1.5, 1.0);
        let cfg = GlobalMapConfig::new(1e-3, 0.0, Winding::One, &prof).unwrap();
        let m = FullMap::new(p, prof.clone(), cfg).unwrap();
        let (z, phi) = (0.5, FRAC_PI_2);
        let r0: f64 = 1e-3 * 1.3 + 0.1 * 0.5;
        let expect_z = r0.powf(1.5);
        let expect_phi = phi + (1.0 / r0).ln();
        let out = m.apply(LiftedPoint::new(z, phi)).unwrap();
        assert!((out.z - expect_z).abs() < 1e-15);
        assert!((out.phi_lift - expect_phi).abs() < 1e-13);
    }

    #[test]
    fn rescaled_constant_profile_is_rigid() {
        let prof = ModulationProfile::constant();
        let cfg = GlobalMapConfig::with_coupling(0.01, 0.4, Winding::One, 0.0, 0.0, &prof).unwrap();
        let m = RescaledMap::new(sf(2.0, 1.0), prof, cfg).unwrap();
        let out = m.apply(LiftedPoint::new(0.7, 1.1)).unwrap();
        assert!((out.z - 1.0).abs() < 1e-15);
        assert!((out.phi_lift - (1.1 + m.omega_tilde())).abs() < 1e-13);
    }

    #[test]
    fn rescaled_rejects_zero_mu() {
        let prof = ModulationProfile::constant();
        let cfg = GlobalMapConfig::new(0.0, 0.0, Winding::One, &prof).unwrap();
        assert!(matches!(RescaledMap::new(sf(2.0, 1.0), prof, cfg), Err(MapError::ZeroMu)));
    }

    #[test]
    fn singular_limit_examples() {
        let m = SingularLimitMap::new(sf(1.5, 1.0), ModulationProfile::constant(), 0.5, Winding::One).unwrap();
        let out = m.apply(LiftedPoint::new(3.0, 1.0)).unwrap();
        assert_eq!(out.z, 1.0);
        assert!((out.phi_lift - 1.5).abs() < 1e-15);

        let prof = ModulationProfile::sine(0.3).unwrap();
        let m = SingularLimitMap::new(sf(1.5, 1.0), prof.clone(), 0.0, Winding::One).unwrap();
        let out = m.apply(LiftedPoint::new(0.2, 0.0)).unwrap();
        assert!((out.z - 1.0).abs() < 1e-15 && out.phi_lift.abs() < 1e-15);

        let m = SingularLimitMap::new(sf(1.5, 1.0), prof, 2.0, Winding::Zero).unwrap();
        let out = m.apply(LiftedPoint::new(0.2, FRAC_PI_2)).unwrap();
        assert!((out.z - 1.3f64.powf(1.5)).abs() < 1e-14);
        assert!((out.phi_lift - (2.0 - 1.3f64.ln())).abs() < 1e-14);
        let j = m.jacobian(LiftedPoint::new(0.2, 0.0)).unwrap();
        assert!((j[(1, 1)] + 0.3).abs() < 1e-15);
    }

    #[test]
    fn circle_map_derivative_and_degree() {
        let prof = ModulationProfile::sine(0.4).unwrap();
        let c = CircleMap::new(&sf(1.5, 2.0), prof, 0.3);
        for phi in [0.0f64, 0.5, 2.0, 5.0] {
            let expect = 1.0 - 2.0 * 0.4 * phi.cos() / (1.0 + 0.4 * phi.sin());
            assert!((c.deriv(phi) - expect).abs() < 1e-14);
            assert!((c.lift(phi + TAU) - c.lift(phi) - TAU).abs() < 1e-12);
        }
        let rigid = CircleMap::new(&sf(1.5, 2.0), ModulationProfile::constant(), 0.3);
        let (reduced, inc) = rigid.image(6.2);
        assert!((inc - 0.3).abs() < 1e-15);
        assert!((reduced - (6.5 - TAU)).abs() < 1e-12);
    }

    #[test]
    fn sine_map_is_degree_zero() {
        let s = SineCircleMap {
            amplitude: 10.0,
            omega_tilde: 1.0,
        };
        assert!((s.lift(0.3 + TAU) - s.lift(0.3)).abs() < 1e-12);
        assert_eq!(s.degree(), 0);
    }
}
