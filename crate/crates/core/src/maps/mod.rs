//! Return maps of a neighbourhood of a saddle-focus: the local passage `T0`,
//! the global return `T1`, their composition, the rescaled and singular-limit
//! annulus maps, the induced circle maps and the one-dimensional model map.

mod composed;
mod curve;
mod global;
mod local;
mod model1d;
mod params;
mod point;

pub use composed::{
    omega_tilde, AnnulusMap, CircleMap, FullMap, LiftedCircleMap, RescaledMap, SineCircleMap,
    SingularLimitMap,
};
pub use curve::{CircleCurve, PeriodicSpline, DEFAULT_CURVE_GRID};
pub use global::global_map_t1;
pub use local::{flow_oracle, local_map_t0, transition_time, FlowState, FlowStop, DEFAULT_ORACLE_STEP};
pub use model1d::{ModelMap1d, ModelFixedPoint};
pub(crate) use model1d::bisect;
pub use params::{
    GlobalMapConfig, ModulationProfile, ProfileShape, SaddleFocusParams, Winding, DEFAULT_EPS_PHI,
    DEFAULT_EPS_R, DEFAULT_PROFILE_GRID,
};
pub use point::{reduce_angle, AnnulusPoint, DiskPoint, LiftedPoint};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("radius r0 = {r0} outside (0, 1]")]
    RadiusDomain { r0: f64 },
    #[error("global map produced r0 = {r0}, outside the entry disk")]
    Range { r0: f64 },
    #[error("height z = {z} is negative")]
    NegativeHeight { z: f64 },
    #[error("splitting parameter mu = 0 has no rescaled map; use the singular limit")]
    ZeroMu,
}

impl MapError {
    pub(crate) fn invalid(name: &'static str, reason: String) -> Self {
        MapError::InvalidParameter { name, reason }
    }
}
