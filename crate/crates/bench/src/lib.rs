//! Shared fixtures for the criterion benches.

use toricpo_core::{ExponentQ, Mode, NovikovSeries, Order, Scalar};

pub fn q(n: i64, d: i64) -> ExponentQ {
    ExponentQ::new(n, d)
}

/// A unit with `len` terms at exponents `k/3`, truncated at `len/3`.
pub fn unit_series(mode: Mode, len: i64) -> NovikovSeries {
    let terms = (0..len).map(|k| (q(k, 3), Scalar::from_ratio(k + 1, k + 2)));
    NovikovSeries::from_terms(mode, terms, Order::Finite(q(len, 3))).unwrap()
}
