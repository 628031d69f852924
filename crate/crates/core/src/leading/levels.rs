use serde::Serialize;

use super::lattice::{echelon, identity, mat_mul, transpose, vec_mat, IntMatrix};
use crate::error::{Error, Result};
use crate::linalg;
use crate::novikov::ExponentQ;
use crate::toric::MomentPolytope;

/// One energy level `S_l` with its facets `(i(l,r), v_{l,r})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Level {
    pub s: ExponentQ,
    pub members: Vec<(usize, Vec<i64>)>,
}

/// Facets grouped by `ℓ_i(u)` and the dimensions of the flag they span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelStructure {
    pub n: usize,
    pub u: Vec<ExponentQ>,
    pub levels: Vec<Level>,
    /// `d(l) = dim A_l^⊥ - dim A_{l-1}^⊥` for every level.
    pub d: Vec<usize>,
    /// First (1-based) level whose flag space is everything.
    pub k_full: Option<usize>,
    /// Number of facets in levels `≤ K`.
    pub kappa: usize,
}

impl LevelStructure {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// `S_l` for a 1-based level index.
    pub fn s(&self, l: usize) -> ExponentQ {
        self.levels[l - 1].s
    }

    /// Levels that carry variables: up to `K`, or all levels when the flag
    /// never reaches the full space.
    pub fn active_levels(&self) -> usize {
        self.k_full.unwrap_or(self.levels.len())
    }
}

/// Group facets by the value of `ℓ_i(u)` and compute the flag dimensions.
pub fn level_structure(p: &MomentPolytope, u: &[ExponentQ]) -> Result<LevelStructure> {
    let ells = p.ell_values(u)?;
    if ells.iter().any(|l| !l.is_positive()) {
        return Err(Error::NotInterior);
    }
    let mut values: Vec<ExponentQ> = ells.clone();
    values.sort();
    values.dedup();
    let levels: Vec<Level> = values
        .iter()
        .map(|&s| Level {
            s,
            members: ells
                .iter()
                .enumerate()
                .filter(|(_, l)| **l == s)
                .map(|(i, _)| (i, p.facets[i].v.clone()))
                .collect(),
        })
        .collect();
    let mut d = Vec::with_capacity(levels.len());
    let mut span: Vec<Vec<i64>> = Vec::new();
    let mut prev_rank = 0;
    let mut k_full = None;
    let mut kappa = 0;
    for (idx, lvl) in levels.iter().enumerate() {
        span.extend(lvl.members.iter().map(|(_, v)| v.clone()));
        let r = linalg::rank_int(&span);
        d.push(r - prev_rank);
        prev_rank = r;
        if k_full.is_none() {
            kappa += lvl.members.len();
            if r == p.n {
                k_full = Some(idx + 1);
            }
        }
    }
    Ok(LevelStructure { n: p.n, u: u.to_vec(), levels, d, k_full, kappa })
}

/// An integral basis `e*_{l,s}` adapted to the flag, as the rows of a
/// unimodular matrix, and its inverse (the `a`-matrix).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlagBasis {
    pub n: usize,
    /// `(l, s)` labels (1-based) of the first `Σ d(l)` rows.
    pub labels: Vec<(usize, usize)>,
    /// `n × n` unimodular; row `k` is `e*` for `labels[k]`, remaining rows
    /// complete the basis when the flag is partial.
    pub basis: Vec<Vec<i64>>,
    /// `a[i][k] = a_{i;(l,s)}`: `e*_i = Σ_k a[i][k] e*_{labels[k]}`.
    pub a: Vec<Vec<i64>>,
    /// `[Z^n : Z-span of the e*]`.
    pub lattice_index: u64,
}

impl FlagBasis {
    pub fn num_vars(&self) -> usize {
        self.labels.len()
    }

    /// Number of variables belonging to levels `≤ l`.
    pub fn vars_up_to(&self, l: usize) -> usize {
        self.labels.iter().filter(|(ll, _)| *ll <= l).count()
    }

    /// Coordinates of `v` in the basis: `v = Σ_k c_k e*_k`.
    pub fn coords(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        let c = vec_mat(v, &self.a);
        if c[self.labels.len()..].iter().any(|x| *x != 0) {
            return Err(Error::NotInLattice(v.to_vec()));
        }
        Ok(c[..self.labels.len()].to_vec())
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(&self, c: &[i64]) -> Vec<i64> {
        let mut full = c.to_vec();
        full.resize(self.n, 0);
        vec_mat(&full, &self.basis)
    }

    /// Exponent vector of `y_i` in the flag variables.
    pub fn y_in_flag_vars(&self, i: usize) -> Vec<i64> {
        self.a[i][..self.labels.len()].to_vec()
    }

    pub fn var_name(&self, k: usize) -> String {
        let (l, s) = self.labels[k];
        format!("y[{l},{s}]")
    }

    pub fn var_names(&self) -> Vec<String> {
        (0..self.labels.len()).map(|k| self.var_name(k)).collect()
    }
}

/// Build the flag basis level by level: each level's members, written in
/// the current basis, are brought to echelon form on the not-yet-used
/// coordinates, which extends the basis by a saturated block.
pub fn flag_basis(ls: &LevelStructure) -> Result<FlagBasis> {
    let n = ls.n;
    let mut b: IntMatrix = identity(n);
    let mut b_inv: IntMatrix = identity(n);
    let mut labels = Vec::new();
    let mut r = 0;
    for (idx, lvl) in ls.levels.iter().enumerate().take(ls.active_levels()) {
        let dl = ls.d[idx];
        if dl == 0 {
            continue;
        }
        let rest: IntMatrix = lvl.members.iter().map(|(_, v)| vec_mat(v, &b_inv)[r..].to_vec()).collect();
        let m_t = transpose(&rest, n - r);
        let e = echelon(&m_t, rest.len());
        if e.rank != dl {
            return Err(Error::BasisConstructionFailed(format!("level {} has rank {} but d = {dl}", idx + 1, e.rank)));
        }
        // Rows of V⁻¹ = columns of U⁻¹ give the new block; V = Uᵀ.
        let v_inv = transpose(&e.u_inv, n - r);
        let v = transpose(&e.u, n - r);
        let mut big_vinv = identity(n);
        let mut big_v = identity(n);
        for i in 0..n - r {
            for j in 0..n - r {
                big_vinv[r + i][r + j] = v_inv[i][j];
                big_v[r + i][r + j] = v[i][j];
            }
        }
        b = mat_mul(&big_vinv, &b);
        b_inv = mat_mul(&b_inv, &big_v);
        for s in 1..=dl {
            labels.push((idx + 1, s));
        }
        r += dl;
    }
    let fb = FlagBasis { n, labels, basis: b, a: b_inv, lattice_index: 1 };
    verify_flag_basis(ls, &fb)?;
    Ok(fb)
}

fn verify_flag_basis(ls: &LevelStructure, fb: &FlagBasis) -> Result<()> {
    if mat_mul(&fb.a, &fb.basis) != identity(fb.n) {
        return Err(Error::BasisConstructionFailed("basis is not unimodular".into()));
    }
    let mut span: Vec<Vec<i64>> = Vec::new();
    for (idx, lvl) in ls.levels.iter().enumerate().take(ls.active_levels()) {
        span.extend(lvl.members.iter().map(|(_, v)| v.clone()));
        let k = fb.vars_up_to(idx + 1);
        let prefix: Vec<Vec<i64>> = fb.basis[..k].to_vec();
        let mut both = prefix.clone();
        both.extend(span.iter().cloned());
        if linalg::rank_int(&prefix) != k || linalg::rank_int(&both) != k || linalg::rank_int(&span) != k {
            return Err(Error::BasisConstructionFailed(format!("prefix does not span A_{}", idx + 1)));
        }
        for (_, v) in &lvl.members {
            let c = fb.coords(v)?;
            if c[k..].iter().any(|x| *x != 0) {
                return Err(Error::BasisConstructionFailed(format!("normal {v:?} leaves its flag space")));
            }
        }
    }
    Ok(())
}
