use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot_int_q;
use crate::novikov::ExponentQ;

/// One facet inequality `ℓ(u) = ⟨v, u⟩ - λ ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub v: Vec<i64>,
    pub lambda: ExponentQ,
}

impl Facet {
    pub fn new(v: Vec<i64>, lambda: ExponentQ) -> Self {
        Facet { v, lambda }
    }

    pub fn ell(&self, u: &[ExponentQ]) -> ExponentQ {
        dot_int_q(&self.v, u) - self.lambda
    }
}

/// A moment polytope given by its facet inequalities. The facet order is
/// significant: it fixes the order of the potential's terms and the indices
/// used by bulk deformations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPolytope {
    pub n: usize,
    pub facets: Vec<Facet>,
    #[serde(default)]
    pub name: String,
    /// Whether the toric manifold is Fano, so that the closed-form bulk
    /// potential applies.
    #[serde(default)]
    pub fano: bool,
}

impl MomentPolytope {
    pub fn new(n: usize, facets: Vec<Facet>, name: impl Into<String>, fano: bool) -> Self {
        MomentPolytope { n, facets, name: name.into(), fano }
    }

    pub fn num_facets(&self) -> usize {
        self.facets.len()
    }

    pub fn normals(&self) -> Vec<Vec<i64>> {
        self.facets.iter().map(|f| f.v.clone()).collect()
    }

    /// `[ℓ_i(u)]` for every facet.
    pub fn ell_values(&self, u: &[ExponentQ]) -> Result<Vec<ExponentQ>> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: u.len() });
        }
        Ok(self.facets.iter().map(|f| f.ell(u)).collect())
    }

    pub fn is_interior(&self, u: &[ExponentQ]) -> Result<bool> {
        Ok(self.ell_values(u)?.iter().all(|l| l.is_positive()))
    }

    /// `𝔳_T^u(z_j) = 𝔳_T(T^{-λ_j}) + ⟨v_j, u⟩`.
    pub fn z_valuation(&self, j: usize, u: &[ExponentQ]) -> ExponentQ {
        -self.facets[j].lambda + dot_int_q(&self.facets[j].v, u)
    }

    /// The polytope shifted by `t`: `λ_i ↦ λ_i + ⟨v_i, t⟩`, so that
    /// `ℓ'_i(u + t) = ℓ_i(u)`.
    pub fn translate(&self, t: &[ExponentQ]) -> MomentPolytope {
        let facets = self
            .facets
            .iter()
            .map(|f| Facet::new(f.v.clone(), f.lambda + dot_int_q(&f.v, t)))
            .collect();
        MomentPolytope { n: self.n, facets, name: self.name.clone(), fano: self.fano }
    }
}
