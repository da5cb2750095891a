//! TOML configuration with one table per module. Every field has a default,
//! unknown keys are rejected, and `section.key = value` overrides are applied
//! on top of the file before the result is validated.

use super::scan::{Axis, ScanTarget};
use super::ExperimentError;
use crate::burster::{
    BursterParams, FlowLyapunovOptions, IntegratorOptions, RegimeOptions, SectionOptions, DEFAULT_DISCARD,
};
use crate::maps::{
    CircleMap, FullMap, GlobalMapConfig, ModulationProfile, ModelMap1d, RescaledMap, SaddleFocusParams,
    SineCircleMap, SingularLimitMap, Winding,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaddleConfig {
    /// Saddle index `lambda/rho`.
    pub nu: f64,
    pub omega_over_rho: f64,
}

impl Default for SaddleConfig {
    fn default() -> Self {
        Self {
            nu: 1.5,
            omega_over_rho: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Sine,
    ExpSine,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    /// Amplitude of `1 + a sin φ`.
    pub a: f64,
    /// Exponent of `exp(s sin φ)`.
    pub s: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            kind: ProfileKind::Sine,
            a: 0.3,
            s: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalConfig {
    pub mu: f64,
    pub phi_star: f64,
    /// Winding of the global map, 0 or 1.
    pub n: u8,
    pub eps_r: f64,
    pub eps_phi: f64,
    /// When set, `phi_star` is derived so that the composed phase shift
    /// equals this value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_tilde: Option<f64>,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            mu: 1e-3,
            phi_star: 0.0,
            n: 1,
            eps_r: 0.1,
            eps_phi: 0.0,
            omega_tilde: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Full,
    Rescaled,
    Singular,
    Circle,
    Sine,
    Model1d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapConfig {
    pub kind: MapKind,
    pub z0: f64,
    pub phi0: f64,
    pub steps: usize,
    pub transient: usize,
    /// Amplitude `A` of the sine model circle map.
    pub amplitude: f64,
    /// Invariant-curve grid size.
    pub grid: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Constant initial graph for the graph transform.
    pub h0: f64,
    pub attraction_seeds: usize,
    pub attraction_steps: usize,
    pub m: usize,
    pub interval: [f64; 2],
    pub strict_margin: f64,
    pub horseshoe_grid: usize,
    pub shadow_sequences: usize,
    pub shadow_length: usize,
    /// Builds `ω̃` so that the `n = 0` singular limit has a fixed point here.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_phi: Option<f64>,
    pub lyapunov_iterations: usize,
    pub rotation_iterations: usize,
    pub max_q: u32,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_count: usize,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            kind: MapKind::Rescaled,
            z0: 0.5,
            phi0: 0.0,
            steps: 1000,
            transient: 0,
            amplitude: 10.0,
            grid: 1024,
            tol: 1e-10,
            max_iter: 10_000,
            h0: 0.5,
            attraction_seeds: 50,
            attraction_steps: 200,
            m: 2,
            interval: [FRAC_PI_2, 3.0 * FRAC_PI_2],
            strict_margin: 1e-9,
            horseshoe_grid: 8192,
            shadow_sequences: 100,
            shadow_length: 12,
            target_phi: None,
            lyapunov_iterations: 100_000,
            rotation_iterations: 10_000,
            max_q: 64,
            sweep_min: 0.0,
            sweep_max: TAU,
            sweep_count: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Model1dConfig {
    pub a: f64,
    pub nu: f64,
    pub alpha: f64,
    pub mu: f64,
}

impl Default for Model1dConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            nu: 2.0,
            alpha: 1.0,
            mu: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BursterConfig {
    pub delta: f64,
    pub mu_slow: f64,
    pub c: f64,
    #[serde(rename = "I")]
    pub drive: f64,
    /// Initial `(v, w, y)`; the standard seed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<[f64; 3]>,
    pub t_span: f64,
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub t_transient: f64,
    pub t_max: f64,
    pub section_discard: usize,
    pub section_keep: usize,
    pub section_t_max: f64,
    pub lyapunov_time: f64,
    pub attractor_analysis: bool,
    /// Fast-branch range; defaults to `[y_AH - 0.5, y_AH + 0.2]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    pub branch_steps: usize,
}

impl Default for BursterConfig {
    fn default() -> Self {
        let r = RegimeOptions::default();
        let s = SectionOptions::default();
        let i = IntegratorOptions::default();
        Self {
            delta: BursterParams::DEFAULT_DELTA,
            mu_slow: BursterParams::DEFAULT_MU_SLOW,
            c: -1.3,
            drive: BursterParams::DEFAULT_DRIVE,
            start: None,
            t_span: 2000.0,
            dt: 0.05,
            rtol: i.rtol,
            atol: i.atol,
            t_transient: r.t_transient,
            t_max: r.t_max,
            section_discard: DEFAULT_DISCARD,
            section_keep: s.keep,
            section_t_max: s.t_max,
            lyapunov_time: FlowLyapunovOptions::default().t_total,
            attractor_analysis: true,
            y_min: None,
            y_max: None,
            branch_steps: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub target: ScanTarget,
    pub analysis: String,
    pub axes: Vec<Axis>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            target: ScanTarget::CircleMap,
            analysis: "rotation_number".into(),
            axes: vec![Axis::linear("omega_tilde", 0.0, TAU, 64)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads for scans; 0 uses every core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 0, workers: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub saddle: SaddleConfig,
    pub profile: ProfileConfig,
    pub global: GlobalConfig,
    pub map: MapConfig,
    pub model1d: Model1dConfig,
    pub burster: BursterConfig,
    pub scan: ScanConfig,
    pub run: RunConfig,
}

fn config_err(e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Config(e.to_string())
}

/// Parses the right-hand side of an override as a TOML value; bare words
/// that are not valid TOML are taken as strings.
pub(crate) fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String, ExperimentError> {
        toml::to_string(self).map_err(|e| ExperimentError::Serialize(e.to_string()))
    }

    /// Sets the dotted key `section.field` to `value`. Unknown keys and
    /// mistyped values are configuration errors.
    pub fn set(&mut self, key: &str, value: toml::Value) -> Result<(), ExperimentError> {
        let mut root = toml::Value::try_from(&*self).map_err(config_err)?;
        let parts: Vec<&str> = key.split('.').collect();
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return Err(ExperimentError::Config(format!("override key `{key}` must look like section.field")));
        }
        let mut node = &mut root;
        for part in &parts[..parts.len() - 1] {
            node = node
                .as_table_mut()
                .and_then(|t| t.get_mut(*part))
                .ok_or_else(|| ExperimentError::Config(format!("unknown section in `{key}`")))?;
        }
        let table = node
            .as_table_mut()
            .ok_or_else(|| ExperimentError::Config(format!("`{key}` does not name a field")))?;
        table.insert(parts[parts.len() - 1].to_string(), value);
        *self = root
            .try_into()
            .map_err(|e| ExperimentError::Config(format!("override `{key}`: {e}")))?;
        Ok(())
    }

    /// Applies a `key=value` override string.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ExperimentError> {
        let (key, raw) = spec
            .split_once('=')
            .ok_or_else(|| ExperimentError::Config(format!("override `{spec}` is not key=value")))?;
        self.set(key.trim(), parse_value(raw.trim()))
    }

    pub fn saddle_params(&self) -> Result<SaddleFocusParams, ExperimentError> {
        Ok(SaddleFocusParams::from_ratios(self.saddle.nu, self.saddle.omega_over_rho)?)
    }

    pub fn profile(&self) -> Result<ModulationProfile, ExperimentError> {
        Ok(match self.profile.kind {
            ProfileKind::Sine => ModulationProfile::sine(self.profile.a)?,
            ProfileKind::ExpSine => ModulationProfile::exp_sine(self.profile.s)?,
            ProfileKind::Constant => ModulationProfile::constant(),
        })
    }

    pub fn winding(&self) -> Result<Winding, ExperimentError> {
        match self.global.n {
            0 => Ok(Winding::Zero),
            1 => Ok(Winding::One),
            n => Err(ExperimentError::Config(format!("global.n must be 0 or 1, got {n}"))),
        }
    }

    /// `ω̃ = phi_star + (omega/rho) ln(1/mu)` unless given directly.
    pub fn omega_tilde(&self) -> Result<f64, ExperimentError> {
        if let Some(w) = self.global.omega_tilde {
            return Ok(w);
        }
        Ok(crate::maps::omega_tilde(&self.saddle_params()?, self.global.mu, self.global.phi_star)?)
    }

    pub fn phi_star(&self) -> f64 {
        match self.global.omega_tilde {
            Some(w) => w + self.saddle.omega_over_rho * self.global.mu.ln(),
            None => self.global.phi_star,
        }
    }

    /// The phase shift that places a fixed point of the `n = 0` singular
    /// limit at `phi`: `ω̃ = phi + (omega/rho) ln alpha(phi)`.
    pub fn omega_tilde_for_target(&self, phi: f64) -> Result<f64, ExperimentError> {
        Ok(phi + self.saddle.omega_over_rho * self.profile()?.alpha(phi).ln())
    }

    pub fn global_cfg(&self, profile: &ModulationProfile) -> Result<GlobalMapConfig, ExperimentError> {
        Ok(GlobalMapConfig::with_coupling(
            self.global.mu,
            self.phi_star(),
            self.winding()?,
            self.global.eps_r,
            self.global.eps_phi,
            profile,
        )?)
    }

    pub fn full_map(&self) -> Result<FullMap, ExperimentError> {
        let prof = self.profile()?;
        let cfg = self.global_cfg(&prof)?;
        Ok(FullMap::new(self.saddle_params()?, prof, cfg)?)
    }

    pub fn rescaled_map(&self) -> Result<RescaledMap, ExperimentError> {
        let prof = self.profile()?;
        let cfg = self.global_cfg(&prof)?;
        Ok(RescaledMap::new(self.saddle_params()?, prof, cfg)?)
    }

    pub fn singular_map(&self) -> Result<SingularLimitMap, ExperimentError> {
        Ok(SingularLimitMap::new(
            self.saddle_params()?,
            self.profile()?,
            self.omega_tilde()?,
            self.winding()?,
        )?)
    }

    pub fn circle_map(&self) -> Result<CircleMap, ExperimentError> {
        Ok(CircleMap::new(&self.saddle_params()?, self.profile()?, self.omega_tilde()?))
    }

    pub fn sine_map(&self) -> Result<SineCircleMap, ExperimentError> {
        if !(self.map.amplitude > 0.0 && self.map.amplitude.is_finite()) {
            return Err(ExperimentError::Config(format!("map.amplitude must be positive, got {}", self.map.amplitude)));
        }
        Ok(SineCircleMap {
            amplitude: self.map.amplitude,
            omega_tilde: self.omega_tilde()?,
        })
    }

    pub fn model_map(&self) -> Result<ModelMap1d, ExperimentError> {
        let m = &self.model1d;
        Ok(ModelMap1d::new(m.a, m.nu, m.alpha, m.mu)?)
    }

    pub fn interval(&self) -> Result<(f64, f64), ExperimentError> {
        let [a, b] = self.map.interval;
        if !(a < b && b - a <= TAU + 1e-12 && a.is_finite() && b.is_finite()) {
            return Err(ExperimentError::Config(format!("map.interval [{a}, {b}] must satisfy a < b <= a + 2π")));
        }
        Ok((a, b))
    }

    pub fn burster_params(&self) -> Result<BursterParams, ExperimentError> {
        let b = &self.burster;
        Ok(BursterParams::new(b.delta, b.mu_slow, b.c, b.drive)?)
    }

    pub fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions::with_tolerances(self.burster.rtol, self.burster.atol)
    }

    pub fn regime_options(&self) -> RegimeOptions {
        let b = &self.burster;
        let base = RegimeOptions::default();
        RegimeOptions {
            t_transient: b.t_transient,
            t_max: b.t_max,
            sample_dt: b.dt,
            attractor_analysis: b.attractor_analysis,
            section: SectionOptions {
                discard: b.section_discard,
                keep: b.section_keep,
                t_max: b.section_t_max,
                integrator: self.integrator(),
                ..base.section
            },
            lyapunov: FlowLyapunovOptions {
                t_total: b.lyapunov_time,
                integrator: self.integrator(),
                ..base.lyapunov
            },
            integrator: self.integrator(),
            ..base
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.saddle_params()?;
        self.profile()?;
        self.winding()?;
        let b = &self.burster;
        for (name, v) in [("burster.t_span", b.t_span), ("burster.dt", b.dt), ("burster.t_max", b.t_max)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ExperimentError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(b.t_transient >= 0.0) {
            return Err(ExperimentError::Config("burster.t_transient must be non-negative".into()));
        }
        if self.map.grid < 8 || !self.map.grid.is_power_of_two() {
            return Err(ExperimentError::Config(format!("map.grid must be a power of two >= 8, got {}", self.map.grid)));
        }
        if self.map.sweep_count < 2 {
            return Err(ExperimentError::Config("map.sweep_count must be at least 2".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = Config::default();
        let text = c.to_toml().unwrap();
        assert_eq!(Config::from_toml(&text).unwrap(), c);
        assert_eq!(Config::from_toml("").unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Config::from_toml("[saddle]\nnu = 2.0\nbogus = 1\n").is_err());
        assert!(Config::from_toml("[nowhere]\nx = 1\n").is_err());
        let mut c = Config::default();
        assert!(c.apply_override("saddle.bogus=1").is_err());
        assert!(c.apply_override("saddle").is_err());
    }

    #[test]
    fn overrides_are_typed() {
        let mut c = Config::from_toml("[profile]\na = 0.5\n").unwrap();
        c.apply_override("profile.a=0.96").unwrap();
        c.apply_override("map.interval=[1.0, 2.0]").unwrap();
        c.apply_override("burster.I=0.7").unwrap();
        c.apply_override("profile.kind=exp_sine").unwrap();
        assert_eq!(c.profile.a, 0.96);
        assert_eq!(c.map.interval, [1.0, 2.0]);
        assert_eq!(c.burster.drive, 0.7);
        assert_eq!(c.profile.kind, ProfileKind::ExpSine);
        assert!(c.apply_override("profile.a=\"x\"").is_err());
    }

    #[test]
    fn omega_tilde_and_phi_star_agree() {
        let mut c = Config::default();
        c.global.omega_tilde = Some(2.5);
        let back = crate::maps::omega_tilde(&c.saddle_params().unwrap(), c.global.mu, c.phi_star()).unwrap();
        assert!((back - 2.5).abs() < 1e-12);
    }
}
