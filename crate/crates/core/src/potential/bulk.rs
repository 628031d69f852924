use crate::error::{Error, Result};
use crate::novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar};

/// The bulk entry on one facet, split as `𝔟_i = b̄_i + 𝔟_{i,+}` with the unit
/// `exp(b̄_i)` supplied directly.
#[derive(Clone, Debug, PartialEq)]
pub struct BulkEntry {
    pub unit: Scalar,
    pub plus: NovikovSeries,
}

impl BulkEntry {
    pub fn zero(mode: Mode) -> Self {
        BulkEntry { unit: mode.one(), plus: NovikovSeries::zero(mode) }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_one() && self.plus.is_empty()
    }

    /// `exp(b̄)·exp(𝔟₊)`, with `𝔟₊` taken modulo `T^trunc`.
    pub fn exp(&self, trunc: Order) -> Result<NovikovSeries> {
        self.plus.truncate(trunc).exp_with_unit(&self.unit)
    }
}

/// A degree-two bulk deformation `Σ 𝔟_i D_i` over the facets, plus any
/// higher-degree components (kept only so that they can be rejected where
/// the closed forms do not apply).
#[derive(Clone, Debug, PartialEq)]
pub struct BulkDeformation {
    pub entries: Vec<BulkEntry>,
    pub higher: Vec<(String, NovikovSeries)>,
}

impl BulkDeformation {
    pub fn zero(m: usize, mode: Mode) -> Self {
        BulkDeformation { entries: vec![BulkEntry::zero(mode); m], higher: Vec::new() }
    }

    /// A pure `Λ₊` bulk with the given per-facet series.
    pub fn from_plus(entries: Vec<NovikovSeries>) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        for (i, s) in entries.into_iter().enumerate() {
            if !s.in_lambda_plus() {
                return Err(Error::OutOfScope(format!("bulk entry {i} is not in Λ₊; use the unit split")));
            }
            out.push(BulkEntry { unit: s.mode().one(), plus: s });
        }
        Ok(BulkDeformation { entries: out, higher: Vec::new() })
    }

    /// `c T^κ D_i`.
    pub fn monomial_on(m: usize, i: usize, c: Scalar, kappa: ExponentQ, mode: Mode) -> Self {
        let mut b = Self::zero(m, mode);
        b.entries[i].plus = NovikovSeries::monomial(mode, c, kappa);
        b
    }

    /// `(log c) D_i`, entered through its unit `c`.
    pub fn log_unit_on(m: usize, i: usize, c: Scalar, mode: Mode) -> Self {
        let mut b = Self::zero(m, mode);
        b.entries[i].unit = mode.coerce(c).expect("scalar mode mismatch");
        b
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Only the units `exp(b̄_i)` enter leading term equations.
    pub fn units(&self) -> Vec<Scalar> {
        self.entries.iter().map(|e| e.unit.clone()).collect()
    }
}
