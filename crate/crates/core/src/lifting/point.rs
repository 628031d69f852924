use crate::error::{Error, Result};
use crate::novikov::{ExponentQ, NovikovSeries, Order};
use crate::potential::{certified_gradient, det_series, hessian_matrix, tight_gradient, PotentialFunction};

const MAX_ITERS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct PointLift {
    /// The critical point modulo `T^target`.
    pub y: Vec<NovikovSeries>,
    pub residual_valuation: Order,
    pub target: ExponentQ,
    pub iterations: usize,
    /// Valuation of the Hessian determinant at the starting point.
    pub hessian_valuation: Order,
}

impl PointLift {
    pub fn certified(&self) -> bool {
        self.residual_valuation >= Order::Finite(self.target)
    }
}

/// Solve `H δ = g` over the Novikov field by Cramer's rule, given `det H`.
fn cramer(h: &[Vec<NovikovSeries>], det: &NovikovSeries, g: &[NovikovSeries]) -> Result<Vec<NovikovSeries>> {
    let inv = det.invert()?;
    (0..g.len())
        .map(|j| {
            let mj: Vec<Vec<NovikovSeries>> = h
                .iter()
                .zip(g)
                .map(|(row, gi)| row.iter().enumerate().map(|(k, x)| if k == j { gi.clone() } else { x.clone() }).collect())
                .collect();
            det_series(&mj)?.0.checked_mul(&inv)
        })
        .collect()
}

/// Newton iteration in logarithmic coordinates, `y ← y · exp(-H⁻¹ ∇F)`,
/// from a point whose leading-order Hessian is nondegenerate. Since the
/// correction has valuation at least `𝔳(∇F) - 𝔳(det H)`, iterating until the
/// gradient vanishes modulo `T^{n + 𝔳(det H)}` fixes the critical point
/// modulo `T^n`; `f` must be known to that precision or the iteration stalls.
pub fn lift_point(f: &PotentialFunction, y0: &[NovikovSeries], n: ExponentQ) -> Result<PointLift> {
    if y0.len() != f.n {
        return Err(Error::DimensionMismatch { expected: f.n, got: y0.len() });
    }
    // the start is exact data, known to the potential's precision
    let y0: Vec<NovikovSeries> =
        y0.iter().map(|s| if s.trunc() > f.trunc() { s.with_trunc(f.trunc()) } else { s.clone() }).collect();
    let (det0, trop0) = det_series(&hessian_matrix(f, &y0)?)?;
    if det0.is_empty() || det0.valuation_bound() > trop0 {
        return Err(Error::DegenerateCritical);
    }
    let hv = det0.valuation_bound();
    let need = Order::Finite(n) + hv;
    let mut y = y0;
    let mut last = None;
    for it in 0..MAX_ITERS {
        let (g, gmin) = tight_gradient(f, &y)?;
        if gmin >= need {
            return finish(y, f, n, it, hv);
        }
        if last.is_some_and(|l| gmin <= l) {
            // float rounding may block the tight floor; settle for the certified one
            if certified_gradient(f, &y)?.1 >= need {
                return finish(y, f, n, it, hv);
            }
            return Err(Error::NoConvergence(format!(
                "gradient stalled at order {gmin}; the potential truncation {} is too low",
                f.trunc()
            )));
        }
        last = Some(gmin);
        let h = hessian_matrix(f, &y)?;
        let (det, _) = det_series(&h)?;
        if det.is_empty() {
            return Err(Error::DegenerateCritical);
        }
        let delta = cramer(&h, &det, &g)?;
        let bound = delta.iter().map(NovikovSeries::noise_valuation_bound).min().unwrap_or(Order::Infinite);
        if bound <= Order::Finite(ExponentQ::ZERO) {
            return Err(Error::NoConvergence(format!("Newton step of valuation {bound} does not lie in Λ₊")));
        }
        y = y
            .iter()
            .zip(&delta)
            .map(|(yi, di)| {
                let step = di.scale(&f.mode.int(-1)).exp()?;
                yi.checked_mul(&step)
            })
            .collect::<Result<_>>()?;
    }
    Err(Error::NoConvergence(format!("no convergence after {MAX_ITERS} Newton steps")))
}

fn finish(y: Vec<NovikovSeries>, f: &PotentialFunction, n: ExponentQ, iterations: usize, hv: Order) -> Result<PointLift> {
    let nt = Order::Finite(n);
    // exact data with nothing at or above T^n stays exact
    let y: Vec<NovikovSeries> = y
        .iter()
        .map(|s| {
            if s.is_exact_data() && s.terms().last().is_none_or(|(e, _)| Order::Finite(*e) < nt) {
                s.clone()
            } else {
                s.truncate(nt)
            }
        })
        .collect();
    let residual_valuation = certified_gradient(f, &y)?.1;
    Ok(PointLift { y, residual_valuation, target: n, iterations, hessian_valuation: hv })
}

/// [`lift_point`] with the potential rebuilt at increasing working precision
/// until the lift succeeds.
pub fn lift_point_adaptive<B>(build: B, y0: &[NovikovSeries], n: ExponentQ) -> Result<PointLift>
where
    B: Fn(Order) -> Result<PotentialFunction>,
{
    let mut last = Error::NoConvergence("no working precision tried".into());
    for extra in [1, 2, 4, 8] {
        let w = n + ExponentQ::integer(extra);
        let f = build(Order::Finite(w))?;
        match lift_point(&f, y0, n) {
            Ok(r) if r.certified() => return Ok(r),
            Ok(_) => last = Error::NoConvergence(format!("residual below target at working precision {w}")),
            Err(Error::NoConvergence(msg)) => last = Error::NoConvergence(msg),
            Err(e) => return Err(e),
        }
    }
    Err(last)
}
