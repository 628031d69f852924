//! Novikov ring arithmetic with rational exponents.

mod exponent;
mod scalar;
mod series;
mod serial;

pub use exponent::{ExponentQ, Order};
pub(crate) use exponent::common_denominator;
pub use scalar::{parse_scalar, Mode, Scalar, DEFAULT_TOL};
pub(crate) use scalar::rational_to_f64;
pub use series::{NovikovSeries, NOISE_FACTOR, TERM_CAP};
pub(crate) use series::{ceil_key, grid_monoid};
pub use serial::parse_series;
