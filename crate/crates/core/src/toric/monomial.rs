use serde::Serialize;

use super::{vertices, MomentPolytope, Vertex};
use crate::error::{Error, Result};
use crate::linalg::{self, dot_int_q, q_from_i64, Q};
use crate::novikov::{ExponentQ, NovikovSeries, Order};

/// `a · y^f`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub a: NovikovSeries,
    pub f: Vec<i64>,
}

/// `coeff · Π z_{j}^{b_j}` over the facets active at `vertex`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZExpression {
    pub coeff: NovikovSeries,
    pub vertex: Vertex,
    /// `(facet index, power)` for each active facet of the vertex.
    pub powers: Vec<(usize, u64)>,
}

impl ZExpression {
    /// Substitute `z_j = T^{-λ_j} y^{v_j}` back: returns `(coefficient, exponent vector)`.
    pub fn expand(&self, p: &MomentPolytope) -> (NovikovSeries, Vec<i64>) {
        let mut f = vec![0i64; p.n];
        let mut shift = ExponentQ::ZERO;
        for &(j, b) in &self.powers {
            let b = b as i64;
            for (fi, vi) in f.iter_mut().zip(&p.facets[j].v) {
                *fi += b * vi;
            }
            shift = shift - p.facets[j].lambda.mul_int(b);
        }
        (self.coeff.shift(shift), f)
    }
}

fn argmin_vertex(p: &MomentPolytope, f: &[i64]) -> Result<(ExponentQ, Vertex)> {
    if f.len() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: f.len() });
    }
    // vertices() returns points sorted lexicographically, so the first
    // minimizer is the lexicographically smallest.
    let verts = vertices(p);
    let mut best: Option<(ExponentQ, Vertex)> = None;
    for v in verts {
        let val = dot_int_q(f, &v.point);
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, v));
        }
    }
    best.ok_or_else(|| Error::InvalidPolytope("polytope has no vertices".into()))
}

/// `𝔳_T^P(a y^f) = 𝔳_T(a) + min_{u ∈ P} ⟨f, u⟩` with an attaining vertex.
pub fn monomial_min_valuation(p: &MomentPolytope, m: &Monomial) -> Result<(Order, Vertex)> {
    let (c, v) = argmin_vertex(p, &m.f)?;
    let val = match m.a.valuation() {
        Order::Finite(e) => Order::Finite(e + c),
        Order::Infinite => Order::Infinite,
    };
    Ok((val, v))
}

/// Rewrite `a y^f` as `a T^{⟨f,u⁰⟩} Π z_{j_i}^{b_i}` at the minimizing vertex
/// `u⁰`, where `f = Σ b_i v_{j_i}` with `b_i ≥ 0`.
pub fn monomial_to_z(p: &MomentPolytope, m: &Monomial) -> Result<ZExpression> {
    let (val, vertex) = monomial_min_valuation(p, m)?;
    if let Order::Finite(x) = val {
        if x.is_negative() {
            return Err(Error::NotInLambda0P(x.to_string()));
        }
    }
    if vertex.active.len() != p.n {
        return Err(Error::InvalidPolytope("minimizing vertex is not simple".into()));
    }
    // Solve Σ b_i v_{j_i} = f, i.e. Vᵀ b = f with V the active normals as rows.
    let a: Vec<Vec<Q>> =
        (0..p.n).map(|r| vertex.active.iter().map(|&j| q_from_i64(p.facets[j].v[r])).collect()).collect();
    let rhs: Vec<Q> = m.f.iter().map(|x| q_from_i64(*x)).collect();
    let b = linalg::solve_square(&a, &rhs).ok_or_else(|| Error::InvalidPolytope("singular vertex".into()))?;
    let mut powers = Vec::with_capacity(p.n);
    for (&j, bi) in vertex.active.iter().zip(&b) {
        if !bi.is_integer() || bi < &Q::from_integer(0.into()) {
            return Err(Error::InvalidPolytope(format!("z-exponent {bi} is not a nonnegative integer")));
        }
        let bi: u64 = bi.to_integer().try_into().expect("z exponent overflow");
        powers.push((j, bi));
    }
    let shift = dot_int_q(&m.f, &vertex.point);
    Ok(ZExpression { coeff: m.a.shift(shift), vertex, powers })
}
