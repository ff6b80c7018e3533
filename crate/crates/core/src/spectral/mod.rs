//! Exact computations in the occupation-number representation.

mod cache;
mod htable;
mod modes;
mod sample;
mod table;

pub use cache::CacheKey;
pub use htable::HTable;
pub use modes::{build_mode_set, tail_mass_estimate, Level, Mode, ModeSet, DEFAULT_MAX_MODES};
pub use sample::{
    typical_clauses, typical_set_probability, OccupancyState, TypicalClauses, TypicalSetEstimate,
};
pub use table::{cycle_weight_sums, grand_canonical_pressure, PartitionTable};

use std::sync::Arc;

use crate::alpha::Alpha;
use crate::error::Result;

/// Builds the h-table and the partition table for `N` particles in one call.
pub fn partition_table(modes: Arc<ModeSet>, n: usize, alpha: Alpha) -> Result<PartitionTable> {
    let h = HTable::new(alpha, n.max(1))?;
    PartitionTable::build(modes, n, &h)
}
