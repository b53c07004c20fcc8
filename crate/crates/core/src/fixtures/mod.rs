//! Procedural fixtures. The files under `fixtures/` are generated from these
//! and checked against them by the golden tests.

mod catalog;
pub mod rope;
pub mod skeletal;
pub mod soft;

pub use catalog::{catalog, from_hex, golden_messages, to_hex, FixtureFile, GOLDEN_FRAME};
pub use rope::{crossing_ropes, hanging_rope, trefoil, TrefoilFixture, KNOT_RADIUS, KNOT_SEGMENT};
pub use skeletal::{arm, smooth, walk, SkeletalFixture, WALK_FRAMES};
pub use soft::{bar, bar_slab, cube, jello, lattice_index, BAR_DIMS, JELLO_DIMS};
