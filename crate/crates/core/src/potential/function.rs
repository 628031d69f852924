use std::collections::BTreeMap;

use super::BulkDeformation;
use crate::error::{Error, Result};
use crate::novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar};
use crate::toric::MomentPolytope;

/// A Laurent polynomial in `y_1..y_n` with Novikov series coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialFunction {
    pub n: usize,
    pub mode: Mode,
    terms: BTreeMap<Vec<i64>, NovikovSeries>,
}

/// One term `c_σ T^{ℓ'_σ(u)+ρ_σ} y^{v'_σ}` of a gapped tail, with
/// `v'_σ = Σ e_σ^i v_i` and `ℓ'_σ = Σ e_σ^i ℓ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GappedTerm {
    pub c: Scalar,
    pub e: Vec<i64>,
    pub rho: ExponentQ,
}

impl PotentialFunction {
    pub fn zero(n: usize, mode: Mode) -> Self {
        PotentialFunction { n, mode, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, NovikovSeries)>>(n: usize, mode: Mode, it: I) -> Result<Self> {
        let mut p = Self::zero(n, mode);
        for (v, c) in it {
            p.add_term(v, c)?;
        }
        Ok(p)
    }

    /// Add `c y^v`, merging with an existing term. Terms whose coefficient
    /// becomes exactly zero are removed.
    pub fn add_term(&mut self, v: Vec<i64>, c: NovikovSeries) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        if !c.mode().same_kind(&self.mode) {
            return Err(Error::ModeMismatch);
        }
        let merged = match self.terms.remove(&v) {
            Some(old) => old.checked_add(&c)?,
            None => c,
        };
        if !(merged.is_empty() && merged.is_exact_data()) {
            self.terms.insert(v, merged);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &NovikovSeries)> {
        self.terms.iter()
    }

    pub fn coeff(&self, v: &[i64]) -> Option<&NovikovSeries> {
        self.terms.get(v)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest coefficient truncation.
    pub fn trunc(&self) -> Order {
        self.terms.values().map(NovikovSeries::trunc).min().unwrap_or(Order::Infinite)
    }

    pub fn truncate(&self, n: Order) -> Self {
        let terms = self.terms.iter().map(|(v, c)| (v.clone(), c.truncate(n))).collect();
        PotentialFunction { n: self.n, mode: self.mode, terms }
    }

    pub fn to_float(&self, tol: f64) -> Self {
        let terms = self.terms.iter().map(|(v, c)| (v.clone(), c.to_float(tol))).collect();
        PotentialFunction { n: self.n, mode: Mode::Float { tol }, terms }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (v, c) in &other.terms {
            out.add_term(v.clone(), -c)?;
        }
        Ok(out)
    }

    /// Whether every coefficient vanishes modulo `T^n` (absent terms count as zero).
    pub fn is_zero_mod(&self, n: Order) -> bool {
        self.terms.values().all(|c| c.valuation() >= n)
    }
}

fn interior_ells(p: &MomentPolytope, u: &[ExponentQ]) -> Result<Vec<ExponentQ>> {
    let ells = p.ell_values(u)?;
    if ells.iter().any(|l| !l.is_positive()) {
        return Err(Error::NotInterior);
    }
    Ok(ells)
}

/// `Σ_i T^{ℓ_i(u)} y^{v_i}`.
pub fn leading_potential(p: &MomentPolytope, u: &[ExponentQ], mode: Mode) -> Result<PotentialFunction> {
    let ells = interior_ells(p, u)?;
    let mut f = PotentialFunction::zero(p.n, mode);
    for (facet, l) in p.facets.iter().zip(ells) {
        f.add_term(facet.v.clone(), NovikovSeries::t_pow(mode, l))?;
    }
    Ok(f)
}

/// `Σ_i exp(𝔟_i) T^{ℓ_i(u)} y^{v_i}` for a Fano polytope and degree-two
/// bulk, all coefficients modulo `T^trunc`.
pub fn fano_bulk_potential(
    p: &MomentPolytope,
    u: &[ExponentQ],
    bulk: &BulkDeformation,
    trunc: Order,
) -> Result<PotentialFunction> {
    if !p.fano {
        return Err(Error::NotFano);
    }
    if !bulk.higher.is_empty() {
        return Err(Error::OutOfScope("higher-degree bulk classes in the Fano closed form".into()));
    }
    if bulk.len() != p.num_facets() {
        return Err(Error::DimensionMismatch { expected: p.num_facets(), got: bulk.len() });
    }
    let ells = interior_ells(p, u)?;
    let mode = bulk.entries.first().map_or(Mode::Exact, |e| e.plus.mode());
    let mut f = PotentialFunction::zero(p.n, mode);
    for ((facet, l), entry) in p.facets.iter().zip(ells).zip(&bulk.entries) {
        let rel = match trunc {
            Order::Finite(t) => Order::Finite(t - l),
            Order::Infinite => Order::Infinite,
        };
        let c = entry.exp(rel)?.shift(l).truncate(trunc);
        f.add_term(facet.v.clone(), c)?;
    }
    Ok(f)
}

/// `base + Σ c_σ T^{ℓ'_σ(u)+ρ_σ} y^{v'_σ}`, merged by exponent vector and
/// truncated at `trunc`.
pub fn with_gapped_tail(
    base: &PotentialFunction,
    p: &MomentPolytope,
    u: &[ExponentQ],
    tail: &[GappedTerm],
    trunc: Order,
) -> Result<PotentialFunction> {
    let ells = p.ell_values(u)?;
    let mut out = base.truncate(trunc);
    for (k, t) in tail.iter().enumerate() {
        if t.e.len() != p.num_facets() {
            return Err(Error::BadGappedTerm(format!("term {k}: e has length {}, expected {}", t.e.len(), p.num_facets())));
        }
        if t.e.iter().any(|x| *x < 0) || t.e.iter().sum::<i64>() == 0 {
            return Err(Error::BadGappedTerm(format!("term {k}: e must be nonnegative and nonzero")));
        }
        if !t.rho.is_positive() {
            return Err(Error::BadGappedTerm(format!("term {k}: rho must be positive")));
        }
        let mut v = vec![0i64; p.n];
        let mut ell = t.rho;
        for (i, &ei) in t.e.iter().enumerate() {
            for (vj, fj) in v.iter_mut().zip(&p.facets[i].v) {
                *vj += ei * fj;
            }
            ell += ells[i].mul_int(ei);
        }
        let coeff = NovikovSeries::from_terms(base.mode, [(ell, t.c.clone())], trunc)?;
        out.add_term(v, coeff)?;
    }
    Ok(out)
}

/// `y_k ∂/∂y_k`: each term multiplied by its `k`-th exponent (0-based `k`).
pub fn log_derivative(f: &PotentialFunction, k: usize) -> PotentialFunction {
    let mut out = PotentialFunction::zero(f.n, f.mode);
    for (v, c) in &f.terms {
        if v[k] != 0 {
            let scaled = c.scale(&f.mode.int(v[k]));
            out.terms.insert(v.clone(), scaled);
        }
    }
    out
}
