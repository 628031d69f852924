use std::collections::HashMap;

use super::{fano_bulk_potential, log_derivative, BulkDeformation, PotentialFunction};
use crate::error::{Error, Result};
use num_complex::Complex64;

use crate::novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar, NOISE_FACTOR};
use crate::toric::MomentPolytope;

/// Relative precision used to invert an exact, multi-term determinant.
const PAIRING_RELATIVE_PRECISION: i64 = 4;

struct PowerCache<'a> {
    y: &'a [NovikovSeries],
    inv: Vec<Option<NovikovSeries>>,
    pows: HashMap<(usize, i64), NovikovSeries>,
}

impl<'a> PowerCache<'a> {
    fn new(y: &'a [NovikovSeries]) -> Result<Self> {
        for (i, yi) in y.iter().enumerate() {
            if !yi.is_unit() {
                return Err(Error::NonUnitEvaluation(i));
            }
        }
        Ok(PowerCache { y, inv: vec![None; y.len()], pows: HashMap::new() })
    }

    fn pow(&mut self, i: usize, k: i64) -> Result<NovikovSeries> {
        if k == 0 {
            return Ok(NovikovSeries::one(self.y[i].mode()));
        }
        if let Some(p) = self.pows.get(&(i, k)) {
            return Ok(p.clone());
        }
        let step = if k > 0 {
            self.y[i].clone()
        } else {
            if self.inv[i].is_none() {
                self.inv[i] = Some(self.y[i].invert()?);
            }
            self.inv[i].clone().expect("just set")
        };
        let prev = self.pow(i, k - k.signum())?;
        let p = prev.checked_mul(&step)?;
        self.pows.insert((i, k), p.clone());
        Ok(p)
    }

    fn monomial(&mut self, v: &[i64]) -> Result<NovikovSeries> {
        let mut acc: Option<NovikovSeries> = None;
        for (i, &k) in v.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = self.pow(i, k)?;
            acc = Some(match acc {
                None => p,
                Some(a) => a.checked_mul(&p)?,
            });
        }
        Ok(acc.unwrap_or_else(|| NovikovSeries::one(self.y[0].mode())))
    }
}

/// `(v, c·y^v)` for every term.
fn term_values(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<Vec<(Vec<i64>, NovikovSeries)>> {
    if y.len() != f.n {
        return Err(Error::DimensionMismatch { expected: f.n, got: y.len() });
    }
    if y.iter().any(|yi| !yi.mode().same_kind(&f.mode)) {
        return Err(Error::ModeMismatch);
    }
    let mut cache = PowerCache::new(y)?;
    let mut out = Vec::with_capacity(f.len());
    for (v, c) in f.terms() {
        out.push((v.clone(), c.checked_mul(&cache.monomial(v)?)?));
    }
    Ok(out)
}

fn sum_series(f: &PotentialFunction, it: impl Iterator<Item = NovikovSeries>) -> Result<NovikovSeries> {
    let mut acc = NovikovSeries::zero(f.mode);
    for s in it {
        acc = acc.checked_add(&s)?;
    }
    Ok(acc)
}

/// `F(y)` at a point of `(Λ₀ \ Λ₊)^n`.
pub fn evaluate(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<NovikovSeries> {
    let vals = term_values(f, y)?;
    sum_series(f, vals.into_iter().map(|(_, s)| s))
}

/// All logarithmic derivatives `y_k ∂F/∂y_k` at `y`, and the certified lower
/// bound on their valuations.
pub fn gradient_residual(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<(Vec<NovikovSeries>, Order)> {
    let vals = term_values(f, y)?;
    let mut grad = Vec::with_capacity(f.n);
    for k in 0..f.n {
        let g = sum_series(f, vals.iter().filter(|(v, _)| v[k] != 0).map(|(v, s)| s.scale(&f.mode.int(v[k]))))?;
        grad.push(g);
    }
    let min = grad.iter().map(NovikovSeries::valuation_bound).min().unwrap_or(Order::Infinite);
    Ok((grad, min))
}

/// Coefficientwise modulus, a majorant for float error analysis.
fn modulus(s: &NovikovSeries) -> NovikovSeries {
    s.map_coeffs(|_, c| Scalar::Float(Complex64::new(c.norm(), 0.0)))
}

/// [`gradient_residual`] whose valuation ignores float rounding noise. A
/// coefficient counts as noise when its modulus is at most `NOISE_FACTOR · tol`
/// times the same coefficient of the gradient computed from moduli, floored
/// at 1; the majorant bounds every partial sum, so cancellation among large
/// terms is not mistaken for a nonzero residual. Exact mode is unchanged.
pub fn certified_gradient(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<(Vec<NovikovSeries>, Order)> {
    noise_gradient(f, y, NOISE_FACTOR)
}

/// [`certified_gradient`] with the absolute floor lowered from
/// `NOISE_FACTOR · tol` to `tol`. Iterations aim for this valuation and fall
/// back to the certified one once they stop improving.
pub fn tight_gradient(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<(Vec<NovikovSeries>, Order)> {
    noise_gradient(f, y, 1.0)
}

fn noise_gradient(f: &PotentialFunction, y: &[NovikovSeries], floor: f64) -> Result<(Vec<NovikovSeries>, Order)> {
    let (grad, v) = gradient_residual(f, y)?;
    let Mode::Float { tol } = f.mode else {
        return Ok((grad, v));
    };
    let abs_y: Vec<NovikovSeries> = y.iter().map(modulus).collect();
    let mut cache = PowerCache::new(&abs_y)?;
    for (i, yi) in y.iter().enumerate() {
        cache.inv[i] = Some(modulus(&yi.invert()?));
    }
    let mut terms = Vec::with_capacity(f.len());
    for (v, c) in f.terms() {
        terms.push((v.clone(), modulus(c).checked_mul(&cache.monomial(v)?)?));
    }
    let mut min = Order::Infinite;
    for (k, g) in grad.iter().enumerate() {
        let m = sum_series(f, terms.iter().filter(|(v, _)| v[k] != 0).map(|(v, s)| s.scale(&f.mode.int(v[k].abs()))))?;
        let first = g
            .terms()
            .iter()
            .find(|(e, c)| c.norm() > (NOISE_FACTOR * tol * m.coeff(*e).norm()).max(floor * tol))
            .map_or(Order::Infinite, |(e, _)| Order::Finite(*e));
        min = min.min(first).min(g.trunc());
    }
    Ok((grad, min))
}

/// Second logarithmic derivatives at a critical point and derived data.
#[derive(Clone, Debug, PartialEq)]
pub struct HessianData {
    pub matrix: Vec<Vec<NovikovSeries>>,
    pub det: NovikovSeries,
    pub residue_self_pairing: Option<NovikovSeries>,
    /// The determinant vanishes at the working truncation.
    pub degenerate: bool,
    /// The determinant's valuation exceeds the tropical determinant of the
    /// entries' valuations: the leading-order Hessian is singular.
    pub leading_degenerate: bool,
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, n, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], n, &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            (p, if inv % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

/// Determinant by permutation expansion and the tropical determinant
/// `min_σ Σ_i 𝔳(m_{i,σ(i)})` of the valuation bounds.
pub fn det_series(m: &[Vec<NovikovSeries>]) -> Result<(NovikovSeries, Order)> {
    let n = m.len();
    let mode = m.first().and_then(|r| r.first()).map(|s| s.mode()).unwrap_or(crate::novikov::Mode::Exact);
    let mut det = NovikovSeries::zero(mode);
    let mut trop = Order::Infinite;
    for (p, sign) in permutations(n) {
        let mut term = NovikovSeries::one(mode);
        let mut tv = Order::Finite(ExponentQ::ZERO);
        for (i, &j) in p.iter().enumerate() {
            term = term.checked_mul(&m[i][j])?;
            tv = tv + m[i][j].valuation_bound();
        }
        trop = trop.min(tv);
        det = if sign > 0 { det.checked_add(&term)? } else { det.checked_sub(&term)? };
    }
    Ok((det, trop))
}

/// Matrix of second logarithmic derivatives `y_i ∂/∂y_i y_j ∂F/∂y_j`.
pub fn hessian_matrix(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<Vec<Vec<NovikovSeries>>> {
    let vals = term_values(f, y)?;
    let n = f.n;
    let mut matrix = vec![vec![NovikovSeries::zero(f.mode); n]; n];
    for i in 0..n {
        for j in i..n {
            let h = sum_series(
                f,
                vals.iter().filter(|(v, _)| v[i] * v[j] != 0).map(|(v, s)| s.scale(&f.mode.int(v[i] * v[j]))),
            )?;
            matrix[i][j] = h.clone();
            matrix[j][i] = h;
        }
    }
    Ok(matrix)
}

/// Hessian in logarithmic coordinates `x_i = log y_i`.
pub fn hessian(f: &PotentialFunction, y: &[NovikovSeries]) -> Result<HessianData> {
    let matrix = hessian_matrix(f, y)?;
    let (det, trop) = det_series(&matrix)?;
    let degenerate = det.is_empty();
    let leading_degenerate = det.valuation_bound() > trop;
    let residue_self_pairing = if degenerate {
        None
    } else {
        let base = if det.is_exact_data() && det.len() > 1 {
            let v = det.valuation().finite().expect("nonzero");
            det.with_trunc(Order::Finite(v + ExponentQ::integer(PAIRING_RELATIVE_PRECISION)))
        } else {
            det.clone()
        };
        Some(base.invert()?)
    };
    Ok(HessianData { matrix, det, residue_self_pairing, degenerate, leading_degenerate })
}

/// Result of comparing `𝔈(F)` with `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerCheck {
    pub holds: bool,
    pub euler: PotentialFunction,
    pub residual: PotentialFunction,
}

/// `d/d𝔟 exp(𝔟) = Σ_{k≥1} 𝔟^{k-1}/(k-1)!`, summed directly.
fn exp_derivative_power_sum(entry: &super::BulkEntry, rel: Order) -> Result<NovikovSeries> {
    let b = entry.plus.truncate(rel);
    let mode = b.mode();
    let mut acc = NovikovSeries::one(mode).truncate(rel);
    if b.is_empty() {
        return Ok(acc.scale(&entry.unit));
    }
    if rel.is_infinite() {
        return Err(Error::UnboundedTruncation);
    }
    let mut term = NovikovSeries::one(mode);
    for k in 1.. {
        term = term.checked_mul(&b)?.truncate(rel).scale(&mode.rational(ExponentQ::new(1, k)));
        if term.is_empty() {
            break;
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc.scale(&entry.unit))
}

/// Apply the Euler field `Σ_i r_i 𝔴_i ∂/∂𝔴_i` (with `𝔴_i = exp(𝔟_i)` and
/// `r_i = 1` for the divisor classes) to the Fano bulk potential and compare
/// with the potential modulo `T^N`.
pub fn euler_check(p: &MomentPolytope, bulk: &BulkDeformation, u: &[ExponentQ], n: Order) -> Result<EulerCheck> {
    if !bulk.higher.is_empty() {
        return Err(Error::OutOfScope("Euler check with higher-degree bulk".into()));
    }
    let f = fano_bulk_potential(p, u, bulk, n)?;
    let ells = p.ell_values(u)?;
    let r = vec![1i64; p.num_facets()];
    let mut euler = PotentialFunction::zero(p.n, f.mode);
    for (i, facet) in p.facets.iter().enumerate() {
        let rel = match n {
            Order::Finite(t) => Order::Finite(t - ells[i]),
            Order::Infinite => Order::Infinite,
        };
        let d = exp_derivative_power_sum(&bulk.entries[i], rel)?.shift(ells[i]).truncate(n);
        euler.add_term(facet.v.clone(), d.scale(&f.mode.int(r[i])))?;
    }
    let residual = euler.checked_sub(&f)?;
    let holds = residual.terms().all(|(_, c)| {
        if f.mode.is_exact() {
            c.valuation() >= n
        } else {
            c.terms().iter().all(|(e, s)| Order::Finite(*e) >= n || s.norm() <= f.mode.tol().max(1e-12) * 1e3)
        }
    });
    Ok(EulerCheck { holds, euler, residual })
}

/// Iterated logarithmic derivative helper used by tests and the CLI.
pub fn second_log_derivative(f: &PotentialFunction, i: usize, j: usize) -> PotentialFunction {
    log_derivative(&log_derivative(f, i), j)
}
