//! Solutions in `(C*)^n` of leading term systems.
//!
//! Strategy ladder: (a) substitution when some equation is univariate,
//! (b) resultant elimination for two variables, (c) seeded multistart
//! Gauss–Newton. Paths (a) and (b) are exhaustive; (c) is heuristic.

pub mod poly;
pub mod resultant;
pub mod roots;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::laurent::LaurentPoly;
use crate::leading::{leading_equations, LeadingSystem};
use crate::novikov::{Mode, Scalar};
use crate::toric::MomentPolytope;
use crate::ExponentQ;
use poly::{Field, UniPoly};
use resultant::{resultant_y, BiPoly, Interpolate};

/// Residual accepted in the original system.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Distance below which two solutions are identified.
pub const DEDUP_TOL: f64 = 1e-6;
/// Number of multistart seeds on path (c).
pub const NEWTON_SEEDS: usize = 200;
const SEED: u64 = 0x1eed_5eed;
/// Relative size below which a substituted coefficient counts as cancelled.
const CANCEL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Multiplicity {
    Known(usize),
    Unknown,
}

impl Multiplicity {
    fn times(self, k: usize) -> Self {
        match self {
            Multiplicity::Known(m) => Multiplicity::Known(m * k),
            Multiplicity::Unknown => Multiplicity::Unknown,
        }
    }
}

/// Which rung of the ladder produced the solutions; the highest rung used by
/// any branch is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum SolvePath {
    /// No equations left to solve.
    #[serde(rename = "trivial")]
    Trivial,
    #[serde(rename = "a")]
    Univariate,
    #[serde(rename = "b")]
    Resultant,
    #[serde(rename = "c")]
    Newton,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingSolution {
    /// Value of every variable; free variables are set to 1.
    pub values: Vec<Complex64>,
    pub free: Vec<usize>,
    pub multiplicity: Multiplicity,
    /// Max modulus of the original equations at `values`.
    pub residual: f64,
    /// The same values as rationals, when every coordinate is rational.
    pub exact: Option<Vec<BigRational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub solutions: Vec<LeadingSolution>,
    /// All solutions were found (exhaustive paths only).
    pub certified: bool,
    pub path: SolvePath,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub equations: Vec<LaurentPoly>,
    pub free: Vec<usize>,
    pub notes: Vec<String>,
}

/// Divide each equation by its minimal monomial, making exponents
/// nonnegative with no monomial factor; drop zero equations.
pub fn normalize(eqs: &[LaurentPoly]) -> Normalized {
    let nvars = eqs.first().map_or(0, |e| e.nvars);
    let mut notes = Vec::new();
    let mut equations = Vec::new();
    for (i, e) in eqs.iter().enumerate() {
        if e.is_zero() {
            notes.push(format!("equation {i} is identically zero; dropped"));
            continue;
        }
        equations.push(clear_monomial(e));
    }
    let free = (0..nvars).filter(|&k| equations.iter().all(|e| !e.support_vars().contains(&k))).collect();
    Normalized { equations, free, notes }
}

fn clear_monomial(e: &LaurentPoly) -> LaurentPoly {
    let mut m = vec![i64::MAX; e.nvars];
    for (x, _) in e.terms() {
        for (a, b) in m.iter_mut().zip(x) {
            *a = (*a).min(*b);
        }
    }
    let neg: Vec<i64> = m.iter().map(|x| -x).collect();
    e.shift(&neg)
}

/// Substitute `y_k = value`, cancelling coefficients that vanish relative to
/// the size of their summands.
fn substitute(e: &LaurentPoly, k: usize, value: &Scalar) -> LaurentPoly {
    let mode = if e.mode.is_exact() && value.is_exact() { Mode::Exact } else { Mode::float() };
    let mut acc: BTreeMap<Vec<i64>, (Scalar, f64)> = BTreeMap::new();
    for (x, c) in e.terms() {
        let c = mode.coerce(c.clone()).expect("exact to float coercion");
        let v = mode.coerce(value.clone()).expect("exact to float coercion");
        let t = &c * &scalar_pow(&v, x[k]);
        let mut y = x.clone();
        y[k] = 0;
        let slot = acc.entry(y).or_insert_with(|| (mode.zero(), 0.0));
        slot.1 += t.norm();
        slot.0 = &slot.0 + &t;
    }
    let terms = acc
        .into_iter()
        .filter(|(_, (c, size))| c.is_exact() || c.norm() > CANCEL_TOL * size)
        .map(|(y, (c, _))| (y, c));
    LaurentPoly::from_terms(e.nvars, mode, terms)
}

fn scalar_pow(v: &Scalar, k: i64) -> Scalar {
    match v {
        Scalar::Exact(q) => Scalar::Exact(num_traits::Pow::pow(q, k as i32)),
        Scalar::Float(z) => Scalar::Float(z.powi(k as i32)),
    }
}

/// Univariate restriction as an ascending coefficient list.
fn univariate(e: &LaurentPoly, k: usize) -> Vec<Scalar> {
    let deg = e.terms().map(|(x, _)| x[k]).max().unwrap_or(0) as usize;
    let mut c = vec![e.mode.zero(); deg + 1];
    for (x, v) in e.terms() {
        c[x[k] as usize] = v.clone();
    }
    c
}

/// Roots with multiplicities of a polynomial with nonzero constant term.
/// Rational roots of exact inputs stay exact.
fn roots_with_mult(c: &[Scalar]) -> Vec<(Scalar, usize)> {
    let mut out = Vec::new();
    if let Some(q) = poly::exact_coeffs(c) {
        for (f, k) in UniPoly::new(q).squarefree() {
            if f.degree() == Some(1) {
                out.push((Scalar::Exact(-(&f.c[0] / &f.c[1])), k));
            } else {
                out.extend(roots::roots(&f.to_complex()).into_iter().map(|z| (Scalar::Float(z), k)));
            }
        }
    } else {
        let p = UniPoly::new(c.iter().map(Scalar::to_complex).collect()).trim_relative();
        for (f, k) in p.squarefree() {
            out.extend(roots::roots(&f).into_iter().map(|z| (Scalar::Float(z), k)));
        }
    }
    out
}

fn to_bipoly<F: Field>(e: &LaurentPoly, x: usize, y: usize, conv: impl Fn(&Scalar) -> F) -> BiPoly<F> {
    e.terms().map(|(m, c)| ((m[x] as usize, m[y] as usize), conv(c))).collect()
}

/// `Res_y(p, q)` in `x` as scalar coefficients, or `None` if it vanishes.
fn resultant_scalars(p: &LaurentPoly, q: &LaurentPoly, x: usize, y: usize) -> Option<Vec<Scalar>> {
    fn run<F: Interpolate>(p: BiPoly<F>, q: BiPoly<F>, wrap: impl Fn(F) -> Scalar) -> Option<Vec<Scalar>> {
        let mut r = resultant_y(&p, &q);
        r.strip_zero_roots();
        (!r.is_zero()).then(|| r.c.into_iter().map(wrap).collect())
    }
    if p.mode.is_exact() && q.mode.is_exact() {
        let conv = |s: &Scalar| s.as_rational().cloned().expect("exact coefficient");
        run::<BigRational>(to_bipoly(p, x, y, conv), to_bipoly(q, x, y, conv), Scalar::Exact)
    } else {
        let conv = |s: &Scalar| s.to_complex();
        let pp = to_bipoly(p, x, y, conv);
        let qq = to_bipoly(q, x, y, conv);
        let r = run::<Complex64>(pp, qq, Scalar::Float)?;
        // relative vanishing test for a float resultant
        let scale = p.max_norm().max(q.max_norm()).max(1.0);
        let size = r.iter().map(Scalar::norm).fold(0.0, f64::max);
        (size > 1e-8 * scale).then_some(r)
    }
}

struct Branch {
    values: Vec<Option<Scalar>>,
    free: Vec<usize>,
    mult: Multiplicity,
}

struct Search {
    nvars: usize,
    found: Vec<Branch>,
    certified: bool,
    path: SolvePath,
    notes: Vec<String>,
}

impl Search {
    fn rec(&mut self, eqs: Vec<LaurentPoly>, vals: Vec<Option<Scalar>>, mult: Multiplicity) {
        let mut cur = Vec::new();
        for e in eqs {
            if e.is_zero() {
                continue;
            }
            let e = clear_monomial(&e);
            if e.support_vars().is_empty() {
                // nonzero constant: inconsistent branch
                return;
            }
            cur.push(e);
        }
        let mut vars: Vec<usize> = cur.iter().flat_map(|e| e.support_vars()).collect();
        vars.sort_unstable();
        vars.dedup();
        if cur.is_empty() {
            let free: Vec<usize> = (0..self.nvars).filter(|&k| vals[k].is_none()).collect();
            let values = vals.into_iter().map(|v| v.or(Some(Scalar::from_ratio(1, 1)))).collect();
            self.found.push(Branch { values, free, mult });
            return;
        }
        // (a) univariate equation of least degree
        let uni = cur
            .iter()
            .enumerate()
            .filter(|(_, e)| e.support_vars().len() == 1)
            .min_by_key(|(_, e)| e.terms().map(|(x, _)| x.iter().sum::<i64>()).max());
        if let Some((idx, e)) = uni {
            self.path = self.path.max(SolvePath::Univariate);
            let k = e.support_vars()[0];
            let rts = roots_with_mult(&univariate(e, k));
            for (r, m) in rts {
                let next: Vec<LaurentPoly> =
                    cur.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, f)| substitute(f, k, &r)).collect();
                let mut v = vals.clone();
                v[k] = Some(r);
                self.rec(next, v, mult.times(m));
            }
            return;
        }
        // (b) two variables: eliminate by resultant
        if vars.len() == 2 && cur.len() >= 2 {
            let mut pairs: Vec<(usize, usize)> =
                (0..cur.len()).flat_map(|i| (i + 1..cur.len()).map(move |j| (i, j))).collect();
            let deg = |e: &LaurentPoly| e.terms().map(|(x, _)| x.iter().sum::<i64>()).max().unwrap_or(0);
            pairs.sort_by_key(|&(i, j)| deg(&cur[i]) * deg(&cur[j]));
            for (i, j) in pairs {
                for (x, y) in [(vars[0], vars[1]), (vars[1], vars[0])] {
                    let Some(r) = resultant_scalars(&cur[i], &cur[j], x, y) else { continue };
                    self.path = self.path.max(SolvePath::Resultant);
                    for (root, m) in roots_with_mult(&r) {
                        let next = cur.iter().map(|f| substitute(f, x, &root)).collect();
                        let mut v = vals.clone();
                        v[x] = Some(root);
                        self.rec(next, v, mult.times(m));
                    }
                    return;
                }
            }
        }
        // (c) multistart Newton in the remaining variables
        self.path = SolvePath::Newton;
        self.certified = false;
        self.notes.push(format!("multistart Newton in {} variables; completeness not certified", vars.len()));
        for pt in newton_multistart(&cur, &vars, self.nvars) {
            let mut v = vals.clone();
            for (k, z) in vars.iter().zip(pt) {
                v[*k] = Some(Scalar::Float(z));
            }
            let free: Vec<usize> = (0..self.nvars).filter(|&k| v[k].is_none()).collect();
            let values = v.into_iter().map(|x| x.or(Some(Scalar::from_ratio(1, 1)))).collect();
            self.found.push(Branch { values, free, mult: Multiplicity::Unknown });
        }
    }
}

fn eval_all(eqs: &[LaurentPoly], y: &[Complex64]) -> Vec<Complex64> {
    eqs.iter().map(|e| e.eval_complex(y)).collect()
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Gauss–Newton in the variables `vars`, keeping only improving steps.
fn gauss_newton(eqs: &[LaurentPoly], jac: &[Vec<LaurentPoly>], vars: &[usize], mut y: Vec<Complex64>, iters: usize) -> (Vec<Complex64>, f64) {
    let mut f = eval_all(eqs, &y);
    let mut r = max_abs(&f);
    for _ in 0..iters {
        if r < 1e-14 || vars.is_empty() {
            break;
        }
        let j = DMatrix::from_fn(eqs.len(), vars.len(), |i, k| jac[i][vars[k]].eval_complex(&y));
        let b = DVector::from_iterator(f.len(), f.iter().map(|z| -z));
        let Ok(step) = j.svd(true, true).solve(&b, 1e-13) else { break };
        let mut ny = y.clone();
        for (k, &v) in vars.iter().enumerate() {
            ny[v] += step[k];
        }
        let nf = eval_all(eqs, &ny);
        let nr = max_abs(&nf);
        if !(nr < r) || !nr.is_finite() {
            break;
        }
        y = ny;
        f = nf;
        r = nr;
    }
    (y, r)
}

fn jacobian(eqs: &[LaurentPoly], nvars: usize) -> Vec<Vec<LaurentPoly>> {
    eqs.iter().map(|e| (0..nvars).map(|k| e.partial(k)).collect()).collect()
}

/// Seeded starts on the torus `|y| ∈ {1/2, 1, 2}` with phases in the 8th roots
/// of unity. Other variables are fixed at 1.
fn newton_multistart(eqs: &[LaurentPoly], vars: &[usize], nvars: usize) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let jac = jacobian(eqs, nvars);
    let mut found: Vec<Vec<Complex64>> = Vec::new();
    for _ in 0..NEWTON_SEEDS {
        let mut y = vec![Complex64::new(1.0, 0.0); nvars];
        for &k in vars {
            let modulus = [0.5, 1.0, 2.0][rng.random_range(0..3)];
            let phase = std::f64::consts::FRAC_PI_4 * rng.random_range(0..8) as f64;
            y[k] = Complex64::from_polar(modulus, phase);
        }
        let (y, r) = gauss_newton(eqs, &jac, vars, y, 100);
        let pt: Vec<Complex64> = vars.iter().map(|&k| y[k]).collect();
        let on_torus = pt.iter().all(|z| z.norm() > 1e-8 && z.norm() < 1e8);
        if r <= RESIDUAL_TOL * 1e-1 && on_torus && !found.iter().any(|q| dist(q, &pt) < DEDUP_TOL) {
            found.push(pt);
        }
    }
    found
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn cmp_values(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = roots::cmp_complex(*x, *y);
        if o.is_ne() {
            return o;
        }
    }
    std::cmp::Ordering::Equal
}

/// Solve a Laurent system in `nvars` variables.
pub fn solve_polys(eqs: &[LaurentPoly], nvars: usize) -> SolveOutcome {
    let norm = normalize(eqs);
    let mut search =
        Search { nvars, found: Vec::new(), certified: true, path: SolvePath::Trivial, notes: norm.notes.clone() };
    search.rec(norm.equations.clone(), vec![None; nvars], Multiplicity::Known(1));
    let jac = jacobian(eqs, nvars);
    let mut solutions: Vec<LeadingSolution> = Vec::new();
    for b in search.found {
        let mut free = b.free;
        free.extend(norm.free.iter().copied());
        free.sort_unstable();
        free.dedup();
        let y0: Vec<Complex64> = b.values.iter().map(|v| v.as_ref().map_or(Complex64::new(1.0, 0.0), Scalar::to_complex)).collect();
        let exact: Option<Vec<BigRational>> =
            b.values.iter().map(|v| v.as_ref().and_then(|s| s.as_rational().cloned())).collect();
        let movable: Vec<usize> = if exact.is_some() { Vec::new() } else { (0..nvars).filter(|k| !free.contains(k)).collect() };
        let (y, residual) = gauss_newton(eqs, &jac, &movable, y0, 8);
        if residual > RESIDUAL_TOL {
            search.notes.push(format!("discarded candidate with residual {residual:.3e}"));
            search.certified = false;
            continue;
        }
        if solutions.iter().any(|s| dist(&s.values, &y) < DEDUP_TOL) {
            continue;
        }
        solutions.push(LeadingSolution { values: y, free, multiplicity: b.mult, residual, exact });
    }
    solutions.sort_by(|a, b| cmp_values(&a.values, &b.values));
    SolveOutcome { solutions, certified: search.certified, path: search.path, notes: search.notes }
}

impl LeadingSolution {
    /// Values as scalars: exact when available, float otherwise.
    pub fn scalars(&self) -> Vec<Scalar> {
        match &self.exact {
            Some(q) => q.iter().cloned().map(Scalar::Exact).collect(),
            None => self.values.iter().map(|z| Scalar::Float(*z)).collect(),
        }
    }
}

pub fn solve(sys: &LeadingSystem) -> SolveOutcome {
    solve_polys(&sys.polys(), sys.nvars())
}

/// Solve only the equations of levels `≤ l0`.
pub fn solve_partial(p: &MomentPolytope, u: &[ExponentQ], l0: usize, coeffs: Option<&[Scalar]>) -> Result<SolveOutcome> {
    let (_, _, sys) = leading_equations(p, u, Some(l0), coeffs)?;
    Ok(solve(&sys))
}
