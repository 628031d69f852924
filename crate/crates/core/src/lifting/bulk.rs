use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;

use super::monoid::monoid_contains;
use crate::error::{Error, Result};
use crate::leading::{flag_basis, level_structure, FlagBasis, LevelStructure};
use crate::linalg::rref;
use crate::novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar, NOISE_FACTOR};
use crate::potential::{certified_gradient, fano_bulk_potential, BulkDeformation, BulkEntry};
use crate::toric::MomentPolytope;

/// Upper limit on correction steps, far above what desk-scale inputs need.
const MAX_STEPS: usize = 10_000;
/// Relative residual accepted by the float least-squares correction.
const SPAN_TOL: f64 = 1e-8;

/// One correction: the residual's lowest order `k` and the bulk after it.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftStep {
    pub order: ExponentQ,
    /// `(facet, exponent, coefficient)` of each added term.
    pub corrections: Vec<(usize, ExponentQ, Scalar)>,
    pub bulk_after: Vec<NovikovSeries>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BulkLift {
    pub bulk: BulkDeformation,
    pub steps: Vec<LiftStep>,
    /// Valuation of the gradient at the point, recomputed from the closed-form
    /// bulk potential.
    pub residual_valuation: Order,
    pub target: ExponentQ,
    /// Generators of the exponent monoid after the lift.
    pub monoid_gens: Vec<ExponentQ>,
    /// Generators added because a correction exponent fell outside.
    pub monoid_grown: Vec<ExponentQ>,
    /// The point in the original coordinates.
    pub point: Vec<Scalar>,
    /// `S_l` of the level of every facet.
    pub facet_level: Vec<(usize, ExponentQ)>,
}

impl BulkLift {
    pub fn certified(&self) -> bool {
        self.residual_valuation >= Order::Finite(self.target)
    }
}

/// Default exponent generators: consecutive gaps between the levels.
pub fn level_gaps(ls: &LevelStructure) -> Vec<ExponentQ> {
    ls.levels.windows(2).map(|w| w[1].s - w[0].s).collect()
}

/// `Π_k Y_k^{a_{jk}}`: original coordinates of a point given in flag variables.
pub fn flag_point_to_original(fb: &FlagBasis, y: &[Scalar]) -> Result<Vec<Scalar>> {
    (0..fb.n)
        .map(|j| {
            let mut e = vec![0i64; fb.n];
            e[j] = 1;
            monomial_value(y, &fb.coords(&e)?)
        })
        .collect()
}

fn monomial_value(y: &[Scalar], c: &[i64]) -> Result<Scalar> {
    let mode = if y.iter().all(Scalar::is_exact) { Mode::Exact } else { Mode::float() };
    let mut acc = mode.one();
    for (yi, &k) in y.iter().zip(c) {
        let yi = mode.coerce(yi.clone())?;
        let base = if k < 0 { yi.inv().ok_or(Error::DivisionByZero)? } else { yi };
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
    }
    Ok(acc)
}

/// Min-norm solution of `A x = b`, `None` if inconsistent. Columns `cols`.
fn min_norm_exact(cols: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = b.len();
    // (A Aᵀ) z = b, then x = Aᵀ z
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> =
                (0..n).map(|j| cols.iter().map(|c| &c[i] * &c[j]).fold(BigRational::zero(), |a, x| a + x)).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    let piv = rref(&mut m);
    if piv.contains(&n) {
        return None;
    }
    let mut z = vec![BigRational::zero(); n];
    for (r, &c) in piv.iter().enumerate() {
        z[c] = m[r][n].clone();
    }
    Some(cols.iter().map(|c| c.iter().zip(&z).map(|(a, b)| a * b).fold(BigRational::zero(), |s, x| s + x)).collect())
}

fn min_norm_float(cols: &[Vec<num_complex::Complex64>], b: &[num_complex::Complex64]) -> Option<Vec<num_complex::Complex64>> {
    let n = b.len();
    if cols.is_empty() {
        return b.iter().all(|x| x.norm() <= SPAN_TOL).then(Vec::new);
    }
    let a = DMatrix::from_fn(n, cols.len(), |i, k| cols[k][i]);
    let rhs = DVector::from_column_slice(b);
    let x = a.clone().svd(true, true).solve(&rhs, 1e-12).ok()?;
    let res = (&a * &x - &rhs).norm();
    let scale = rhs.norm().max(1.0);
    (res <= SPAN_TOL * scale).then(|| x.iter().copied().collect())
}

/// Lowest exponent above `after` of a nonzero gradient coefficient. In float
/// mode a coefficient is rounding noise when it is at most `NOISE_FACTOR · tol`
/// times the matching coefficient of `Σ_i |c_ij| |contrib_i|`, or below
/// `floor · tol`.
fn leading_order(
    grad: &[NovikovSeries],
    contrib: &[NovikovSeries],
    coords: &[Vec<i64>],
    mode: Mode,
    after: Option<ExponentQ>,
    floor: f64,
) -> Option<ExponentQ> {
    let above = |e: &ExponentQ| after.is_none_or(|a| *e > a);
    let Mode::Float { tol } = mode else {
        return grad.iter().filter_map(|g| g.terms().iter().map(|(e, _)| *e).find(above)).min();
    };
    let mut best: Option<ExponentQ> = None;
    for (j, g) in grad.iter().enumerate() {
        let bound = |e: ExponentQ| -> f64 {
            let m: f64 = contrib.iter().zip(coords).map(|(c, v)| v[j].unsigned_abs() as f64 * c.coeff(e).norm()).sum();
            (NOISE_FACTOR * tol * m).max(floor * tol)
        };
        if let Some((e, _)) = g.terms().iter().find(|(e, c)| above(e) && c.norm() > bound(*e)) {
            best = Some(best.map_or(*e, |b| b.min(*e)));
        }
    }
    best
}

/// Construct a degree-two bulk on the level facets so that the leading
/// solution `y` (in flag coordinates) becomes a critical point of the bulk
/// deformed potential modulo `T^n`. Corrections are chosen order by order as
/// the minimum-norm solution of the linear system in the available normals.
pub fn lift_bulk(
    p: &MomentPolytope,
    u: &[ExponentQ],
    y: &[Scalar],
    n: ExponentQ,
    extra_gens: &[ExponentQ],
) -> Result<BulkLift> {
    if !p.fano {
        return Err(Error::NotFano);
    }
    let ls = level_structure(p, u)?;
    let k_full = ls.k_full.ok_or(Error::NoFullFlag)?;
    let fb = flag_basis(&ls)?;
    if y.len() != fb.num_vars() {
        return Err(Error::DimensionMismatch { expected: fb.num_vars(), got: y.len() });
    }
    let mode = if y.iter().all(Scalar::is_exact) { Mode::Exact } else { Mode::float() };
    let m = p.num_facets();
    let ells = p.ell_values(u)?;
    let mut facet_level = vec![(0usize, ExponentQ::ZERO); m];
    for (idx, lvl) in ls.levels.iter().enumerate() {
        for (i, _) in &lvl.members {
            facet_level[*i] = (idx + 1, lvl.s);
        }
    }
    let coords: Vec<Vec<i64>> = p.facets.iter().map(|f| fb.coords(&f.v)).collect::<Result<_>>()?;
    let mono: Vec<Scalar> = coords.iter().map(|c| monomial_value(y, c)).collect::<Result<_>>()?;
    let mut gens: Vec<ExponentQ> = level_gaps(&ls);
    gens.extend(extra_gens.iter().copied());
    gens.retain(|g| g.is_positive());
    gens.sort();
    gens.dedup();
    let mut grown = Vec::new();
    let nt = Order::Finite(n);
    let mut bulk: Vec<NovikovSeries> = ells.iter().map(|l| NovikovSeries::zero_mod(mode, Order::Finite(n - *l))).collect();
    let mut steps: Vec<LiftStep> = Vec::new();
    let mut last_k: Option<ExponentQ> = None;
    let mut skip: Option<ExponentQ> = None;
    loop {
        // facet contributions m_i T^{ℓ_i} exp(b_i) mod T^n
        let contrib: Vec<NovikovSeries> = (0..m)
            .map(|i| {
                let e = bulk[i].truncate(Order::Finite(n - ells[i])).exp_with_unit(&mode.one())?;
                Ok(e.shift(ells[i]).truncate(nt).scale(&mono[i]))
            })
            .collect::<Result<_>>()?;
        let grad: Vec<NovikovSeries> = (0..fb.n)
            .map(|j| {
                let mut acc = NovikovSeries::zero_mod(mode, nt);
                for i in 0..m {
                    if coords[i][j] != 0 {
                        acc = acc.checked_add(&contrib[i].scale(&mode.int(coords[i][j])))?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let Some(mut k) = leading_order(&grad, &contrib, &coords, mode, skip, 1.0) else { break };
        if last_k.is_some_and(|lk| k <= lk) {
            // float rounding may leave a residual the corrections cannot remove;
            // step past it when it is noise at the certified floor
            if leading_order(&grad, &contrib, &coords, mode, skip, NOISE_FACTOR).is_some_and(|c| c <= k) {
                return Err(Error::NoConvergence(format!("residual order stalled at {k}")));
            }
            skip = Some(k);
            match leading_order(&grad, &contrib, &coords, mode, skip, 1.0) {
                Some(next) => k = next,
                None => break,
            }
        }
        if Order::Finite(k) >= nt {
            break;
        }
        if steps.len() >= MAX_STEPS {
            return Err(Error::NoConvergence(format!("no convergence after {MAX_STEPS} steps")));
        }
        last_k = Some(k);
        let e: Vec<Scalar> = grad.iter().map(|g| g.coeff(k)).collect();
        let avail: Vec<usize> = (0..m).filter(|&i| facet_level[i].0 <= k_full && facet_level[i].1 < k).collect();
        let x: Vec<Scalar> = match mode {
            Mode::Exact => {
                let cols: Vec<Vec<BigRational>> = avail
                    .iter()
                    .map(|&i| {
                        let mi = mono[i].as_rational().expect("exact").clone();
                        coords[i].iter().map(|c| &mi * BigRational::from_integer((*c).into())).collect()
                    })
                    .collect();
                let rhs: Vec<BigRational> = e.iter().map(|s| -s.as_rational().expect("exact").clone()).collect();
                min_norm_exact(&cols, &rhs).ok_or(Error::SpanViolation { order: k })?.into_iter().map(Scalar::Exact).collect()
            }
            Mode::Float { .. } => {
                let cols: Vec<Vec<num_complex::Complex64>> = avail
                    .iter()
                    .map(|&i| coords[i].iter().map(|c| mono[i].to_complex() * *c as f64).collect())
                    .collect();
                let rhs: Vec<num_complex::Complex64> = e.iter().map(|s| -s.to_complex()).collect();
                min_norm_float(&cols, &rhs).ok_or(Error::SpanViolation { order: k })?.into_iter().map(Scalar::Float).collect()
            }
        };
        let mut corrections = Vec::new();
        for (&i, xi) in avail.iter().zip(x) {
            if mode.negligible(&xi) {
                continue;
            }
            let ex = k - facet_level[i].1;
            if !monoid_contains(&gens, ex)? {
                log::info!("exponent monoid grown by {ex} at order {k}");
                gens.push(ex);
                gens.sort();
                grown.push(ex);
            }
            let add = NovikovSeries::from_terms(mode, [(ex, xi.clone())], bulk[i].trunc())?;
            let next = bulk[i].checked_add(&add)?;
            debug_assert!(next.checked_sub(&bulk[i])?.valuation_bound() >= Order::Finite(ex));
            bulk[i] = next;
            corrections.push((i, ex, xi));
        }
        steps.push(LiftStep { order: k, corrections, bulk_after: bulk.clone() });
    }
    let entries: Vec<BulkEntry> = bulk.iter().map(|b| BulkEntry { unit: mode.one(), plus: b.clone() }).collect();
    let bulk = BulkDeformation { entries, higher: Vec::new() };
    let point = flag_point_to_original(&fb, y)?;
    let residual_valuation = bulk_residual(p, u, &bulk, &point, n)?;
    Ok(BulkLift {
        bulk,
        steps,
        residual_valuation,
        target: n,
        monoid_gens: gens,
        monoid_grown: grown,
        point,
        facet_level,
    })
}

/// Gradient valuation of the closed-form bulk potential at a constant point.
pub fn bulk_residual(
    p: &MomentPolytope,
    u: &[ExponentQ],
    bulk: &BulkDeformation,
    point: &[Scalar],
    n: ExponentQ,
) -> Result<Order> {
    // a zero bulk leaves the potential exact, with no truncation
    let f = if bulk.entries.iter().all(BulkEntry::is_zero) && bulk.higher.is_empty() {
        let mode = bulk.entries.first().map_or(Mode::Exact, |e| e.plus.mode());
        fano_bulk_potential(p, u, &BulkDeformation::zero(p.num_facets(), mode), Order::Infinite)?
    } else {
        fano_bulk_potential(p, u, bulk, Order::Finite(n))?
    };
    let ys: Vec<NovikovSeries> = point.iter().map(|c| NovikovSeries::constant(f.mode, f.mode.coerce(c.clone()).expect("coercion"))).collect();
    Ok(certified_gradient(&f, &ys)?.1)
}
