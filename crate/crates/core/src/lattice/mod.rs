//! Geometry of `Z^d \ {0}`: triadic rings, the `N`-sector partition and
//! lacunary sequences.

mod point;
mod ring;
mod sector;
mod sparse;

pub use point::{Coords, LatticePoint};
pub use ring::{
    euclid_bounds_check, for_each_ring_point, map_ring_orbits, map_ring_slices, pow3,
    ring_cardinality, ring_index, ring_points, RingPoints, TriadicRingIndex, MAX_RING_INDEX,
};
pub(crate) use ring::euclid_bounds_hold;
pub use sector::{SectorId, SectorPartition};
pub use sparse::{is_sparse, log3_sqrt_ceil, ratio_at_least, split_into_sparse, SparseSequence};
