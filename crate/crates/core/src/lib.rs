pub mod classify;
pub mod error;
pub mod io;
pub mod laurent;
pub mod leading;
pub mod lifting;
pub mod linalg;
pub mod novikov;
pub mod potential;
pub mod repro;
pub mod solver;
pub mod toric;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
pub use novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar};
pub use potential::{BulkDeformation, PotentialFunction};
pub use toric::MomentPolytope;
