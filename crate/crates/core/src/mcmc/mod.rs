//! Metropolis sampling of `(points, permutation)` configurations on the torus.
//!
//! Permutation proposals are transpositions `π ← π∘(i j)` plus optional
//! 3-cycles; point proposals are uniform displacements. Energy changes are
//! computed from the touched jumps and 2-cycles only.

mod chain;
mod geometry;
mod hamiltonian;
mod state;

pub use chain::{
    run_chain, Acceptance, ChainConfig, ColumnSummary, MoveCounts, Observables, Trace,
    DRIFT_CHECK_INTERVAL,
};
pub use geometry::{generate_points, BoxGeometry, PointProcess, PointSet};
pub use hamiltonian::{HamiltonianSpec, ScatteringLength, TwoCyclePotential};
pub use state::{PermutationState, DRIFT_TOLERANCE};
