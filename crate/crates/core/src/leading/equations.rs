use super::{flag_basis, level_structure, FlagBasis, LevelStructure};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::novikov::{ExponentQ, Mode, Order, Scalar};
use crate::potential::PotentialFunction;
use crate::toric::MomentPolytope;

/// `∂(Σ_r C_{i(l,r)} y^{v_{l,r}})/∂y_{l,s} = 0` in flag variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingEquation {
    pub level: usize,
    pub s: usize,
    pub poly: LaurentPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingSystem {
    /// `(l, s)` labels of the variables, in flat index order.
    pub vars: Vec<(usize, usize)>,
    pub equations: Vec<LeadingEquation>,
    pub cutoff: usize,
    pub mode: Mode,
    pub generalized: bool,
}

impl LeadingSystem {
    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_names(&self) -> Vec<String> {
        self.vars.iter().map(|(l, s)| format!("y[{l},{s}]")).collect()
    }

    pub fn polys(&self) -> Vec<LaurentPoly> {
        self.equations.iter().map(|e| e.poly.clone()).collect()
    }

    /// Each equation of level `l` only involves variables of levels `≤ l`.
    pub fn has_flag_property(&self) -> bool {
        self.equations
            .iter()
            .all(|eq| eq.poly.support_vars().iter().all(|&k| self.vars[k].0 <= eq.level))
    }
}

/// Assemble per-level polynomials `(𝔓𝔒)_l` in flag variables and
/// differentiate them.
fn assemble(
    fb: &FlagBasis,
    cutoff: usize,
    mode: Mode,
    generalized: bool,
    per_level: Vec<Vec<(Vec<i64>, Scalar)>>,
) -> Result<LeadingSystem> {
    let nv = fb.num_vars();
    let mut equations = Vec::new();
    for (idx, terms) in per_level.into_iter().enumerate().take(cutoff) {
        let l = idx + 1;
        let mut poly = LaurentPoly::zero(nv, mode);
        for (v, c) in terms {
            poly.add_term(fb.coords(&v)?, c);
        }
        for (k, &(ll, s)) in fb.labels.iter().enumerate() {
            if ll == l {
                equations.push(LeadingEquation { level: l, s, poly: poly.partial(k) });
            }
        }
    }
    let sys = LeadingSystem { vars: fb.labels.clone(), equations, cutoff, mode, generalized };
    debug_assert!(sys.has_flag_property());
    Ok(sys)
}

fn clamp_cutoff(ls: &LevelStructure, cutoff: Option<usize>) -> usize {
    let max = ls.active_levels();
    cutoff.map_or(max, |c| c.min(max))
}

/// Leading term equations of levels `≤ cutoff` (default: all levels up to
/// `K`). With `coeffs`, facet `i` contributes `C_i y^{v_i}` (generalized
/// equations); otherwise every coefficient is 1.
pub fn leading_equations(
    p: &MomentPolytope,
    u: &[ExponentQ],
    cutoff: Option<usize>,
    coeffs: Option<&[Scalar]>,
) -> Result<(LevelStructure, FlagBasis, LeadingSystem)> {
    let ls = level_structure(p, u)?;
    let fb = flag_basis(&ls)?;
    if let Some(c) = coeffs {
        if c.len() != p.num_facets() {
            return Err(Error::DimensionMismatch { expected: p.num_facets(), got: c.len() });
        }
    }
    let mode = match coeffs {
        Some(c) if c.iter().any(|x| !x.is_exact()) => Mode::float(),
        _ => Mode::Exact,
    };
    let cut = clamp_cutoff(&ls, cutoff);
    let per_level = ls
        .levels
        .iter()
        .map(|lvl| {
            lvl.members
                .iter()
                .map(|(i, v)| (v.clone(), coeffs.map_or_else(|| mode.one(), |c| c[*i].clone())))
                .collect()
        })
        .collect();
    let sys = assemble(&fb, cut, mode, coeffs.is_some(), per_level)?;
    Ok((ls, fb, sys))
}

/// Leading term equations read off a potential: a term `c y^v` belongs to the
/// first level `l` whose flag space contains `v`, and contributes the
/// coefficient of `T^{S_l}` in `c`. Works for any potential whose terms have
/// valuation at least the level of their exponent, e.g. after adding gapped
/// tails or bulk deformations.
pub fn leading_equations_from_potential(
    f: &PotentialFunction,
    ls: &LevelStructure,
    fb: &FlagBasis,
    cutoff: Option<usize>,
) -> Result<LeadingSystem> {
    let cut = clamp_cutoff(ls, cutoff);
    let mut per_level: Vec<Vec<(Vec<i64>, Scalar)>> = vec![Vec::new(); ls.levels.len()];
    for (v, c) in f.terms() {
        let Ok(coords) = fb.coords(v) else { continue };
        let last_nonzero = coords.iter().rposition(|x| *x != 0);
        let level = match last_nonzero {
            Some(k) => fb.labels[k].0,
            None => 1,
        };
        let s = ls.s(level);
        if c.valuation_bound() < Order::Finite(s) {
            return Err(Error::NotLeadingForm { level });
        }
        if c.trunc() <= Order::Finite(s) {
            return Err(Error::NotLeadingForm { level });
        }
        let a = c.coeff(s);
        if !f.mode.negligible(&a) {
            per_level[level - 1].push((v.clone(), a));
        }
    }
    assemble(fb, cut, f.mode, true, per_level)
}
