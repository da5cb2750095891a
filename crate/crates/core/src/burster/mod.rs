//! The slow-fast burster: integration, fast-subsystem structure, sections
//! and regime classification.

pub mod integrator;
mod classify;
mod continuation;
mod fast;
mod lyapunov;
mod model;
mod section;
mod tableau;

pub use classify::{
    analyse_attractor, classify_attractor, classify_regime, curve_stats, detect_spikes, section_topology, spike_stats, subthreshold_maxima,
    zero_exponents, AttractorLabel, AttractorOptions, AttractorReport, CurveStats, RegimeLabel, RegimeOptions,
    RegimeReport, SectionTopology, SpikeStats, MIN_SECTION_POINTS,
};
pub use continuation::{
    fast_equilibrium_branch, fast_limit_cycle_continuation, BranchKind, BranchObject, BranchSample, ContinuationOptions,
    FastBranch, LimitCycle, SpecialKind, SpecialPoint,
};
pub use fast::{
    eigenvalues3, fast_ah_point, fast_equilibria, fast_equilibrium, fast_residual, slow_nullcline_position, AhPoint,
    Criticality, CriticalityProbe, CubicBranch, EquilibriumKind, FastEquilibrium, FastSystem, NullclineReport, TipSide,
};
pub use integrator::{IntegrationError, IntegratorOptions, OdeSystem, Trajectory};
pub use lyapunov::{flow_lyapunov, pattern_of, ExponentPattern, FlowLyapunov, FlowLyapunovOptions, NEGATIVE_EXPONENT_TOL, ZERO_EXPONENT_TOL};
pub use section::{
    default_section, poincare_section, section_crossings, Crossing, CrossingDirection, SectionOptions, SectionPlane,
    SectionResult, DEFAULT_DISCARD, EVENT_TOL,
};
pub use model::{divergence, integrate, jacobian, rhs, standard_seed, BursterParams, BursterState};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BursterError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("continuation failed at y = {y}: {reason}")]
    Continuation { y: f64, reason: String },
}

impl BursterError {
    pub(crate) fn invalid(name: &'static str, reason: String) -> Self {
        BursterError::InvalidParameter { name, reason }
    }
}
