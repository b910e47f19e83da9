//! Stochastic difference equations for time-dependent neutron transport,
//! independent Monte Carlo reference simulators, and capture-perturbation
//! moment analysis.
//!
//! The crate is organized around four layers:
//!
//! * [`grid`], [`material`], [`population`], [`change`] — the discrete
//!   phase-space model: cross sections, the per-packet change table, and the
//!   generic drift / noise-amplitude construction built from it.
//! * [`sheets`] — reproducible Gaussian increments (counter-based keyed
//!   draws) and cumulative sheet surfaces for diagnostics.
//! * [`solver`] — explicit Euler-Maruyama stepping of the stochastic
//!   difference systems: the general phase-space form plus dedicated slab and
//!   energy-group schemes, each with a noise-off deterministic mode.
//! * [`mc`] — independently coded Monte Carlo reference procedures (analog
//!   particle tracking and per-neutron population bookkeeping) sharing no
//!   numerical kernels or random streams with the solvers.
//! * [`perturb`] — closed-form moment equations for a time-varying capture
//!   rate and the mean/variance shifts under a capture perturbation.

pub mod change;
pub mod error;
pub mod grid;
pub mod material;
pub mod mc;
pub mod path;
pub mod perturb;
pub mod population;
pub mod sheets;
pub mod solver;
pub mod stats;

pub use change::{change_table, drift_vector, noise_amplitudes, ChangeEntry, ChangeKind, ChangeTable};
pub use error::{Error, Result};
pub use grid::{Axis, Boundary, PhaseSpaceGrid};
pub use material::{verify_conservation, ConservationReport, MaterialModel};
pub use path::PathResult;
pub use population::PopulationState;
pub use sheets::{SheetSampler, SheetSurface};
pub use stats::EnsembleStats;
