//! Return maps near a saddle-focus and an elliptic burster simulator.
//!
//! - [`maps`]: local and global maps, their compositions, circle maps and
//!   the one-dimensional model map.
//! - [`analysis`]: rotation numbers, invariant curves, horseshoe
//!   certificates, fixed points and Lyapunov exponents of the maps.
//! - [`burster`]: the three-variable slow-fast burster, its fast subsystem
//!   and attractor classification.
//! - [`experiments`]: configuration, parameter scans, output files and the
//!   command-line front end.

pub mod maps;
pub mod analysis;
pub mod burster;
pub mod experiments;
