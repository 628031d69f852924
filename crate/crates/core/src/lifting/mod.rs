//! Lifting leading-order solutions: bulk deformations making a leading
//! solution critical, and Newton lifts of nondegenerate critical points.

mod bulk;
mod cases;
mod monoid;
mod point;

pub use bulk::{bulk_residual, flag_point_to_original, level_gaps, lift_bulk, BulkLift, LiftStep};
pub use cases::{case_analysis_two_point, case_potential, CaseFiber, CaseReport, BULK_FACET};
pub use monoid::{monoid_contains, monoid_enumerate};
pub use point::{lift_point, lift_point_adaptive, PointLift};
