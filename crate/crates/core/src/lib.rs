//! Spatial random permutations on the torus.
//!
//! Exact occupation-number computations, a Metropolis sampler over
//! (points, permutation) configurations, cycle observables and the
//! macroscopic thermodynamics of the ideal and 2-cycle-penalized models.

// Negated float comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod cycles;
pub mod error;
pub mod mcmc;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod thermo;
pub mod verify;

pub use alpha::{alpha_from_scattering_length, Alpha};
pub use cycles::{cycle_stats, macro_cycle_fractions, CycleStats};
pub use error::{Error, Result};
pub use mcmc::{
    run_chain, BoxGeometry, ChainConfig, HamiltonianSpec, PermutationState, PointSet, Trace,
};
pub use model::{
    check_fourier_positivity, DispersionModel, ModelKind, ModelSpec, PositivityReport, RadialTable,
};
pub use spectral::{build_mode_set, HTable, ModeSet, OccupancyState, PartitionTable};
pub use thermo::ThermoResult;
pub use verify::{Suite, SuiteReport};
