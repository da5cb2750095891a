//! Dynamics of the annulus and circle maps.

mod conditions;
mod fixed_points;
mod horseshoe;
mod invariant_curve;
mod lyapunov;
mod rotation;

pub use conditions::{
    check_diffeo_condition, check_prop2_conditions, check_stability_condition, DiffeoCheck, Prop2Alternative,
    Prop2Check, StabilityCheck, DEFAULT_CONDITION_GRID, DEFAULT_STRICT_MARGIN,
};
pub use fixed_points::{find_fixed_points_n0, refine_fixed_point, FixedPointReport};
pub use horseshoe::{
    horseshoe_certify, shadow_sequence, sine_branch_count, HorseshoeCertificate, HorseshoeOptions, ShadowOrbit,
    SineBranches, Strip,
};
pub use invariant_curve::{
    attraction_distance, curve_residual, find_invariant_curve, InvariantCurveOptions, InvariantCurveResult,
};
pub use lyapunov::{circle_lyapunov, lyapunov_exponents_map, MapLyapunov, LYAPUNOV_FLOOR};
pub use rotation::{
    detect_lock, find_plateaus, rotation_number, rotation_number_locked, Lock, Plateau, RotationNumberResult,
    PLATEAU_MIN_POINTS, PLATEAU_TOL,
};

use crate::maps::MapError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("no convergence after {iterations} iterations (last change {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("circle component is not invertible on [{phi_left}, {phi_right}]")]
    NonInvertible { phi_left: f64, phi_right: f64 },
    #[error("orbit left the domain at iterate {iterate}: {source}")]
    Escape { iterate: usize, source: MapError },
    #[error("no horseshoe with {m} symbols: found {found} strips, best expansion margin {best_margin:.6}")]
    NoHorseshoe { m: usize, found: usize, best_margin: f64 },
    #[error("invalid input `{name}`: {reason}")]
    InvalidInput { name: &'static str, reason: String },
}
