use super::point::{lift_point_adaptive, PointLift};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar};
use crate::potential::{fano_bulk_potential, BulkDeformation, PotentialFunction};
use crate::solver::{solve_polys, Multiplicity, SolveOutcome};
use crate::toric::{two_point_blowup, MomentPolytope};

/// Facet `u₂ = 0` carrying the bulk `w T^κ`.
pub const BULK_FACET: usize = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct CaseFiber {
    pub case: u8,
    pub u: Vec<ExponentQ>,
    /// Order of the correction `y₂ = -1 + c T^μ`.
    pub mu: ExponentQ,
    /// Solutions `(c̄, d̄)` of the secondary equations, variables in that order.
    pub secondary: SolveOutcome,
    /// Number of solutions counted with multiplicity that the case predicts.
    pub expected: usize,
    pub lifts: Vec<Result<PointLift>>,
    pub multiple_root: bool,
}

impl CaseFiber {
    pub fn solution_count(&self) -> usize {
        self.secondary
            .solutions
            .iter()
            .map(|s| match s.multiplicity {
                Multiplicity::Known(m) => m,
                Multiplicity::Unknown => 1,
            })
            .sum()
    }

    pub fn certified_lifts(&self) -> usize {
        self.lifts.iter().filter(|l| l.as_ref().is_ok_and(PointLift::certified)).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseReport {
    pub alpha: ExponentQ,
    pub beta: ExponentQ,
    pub kappa: ExponentQ,
    /// `α/2 - 1/6`, where the two regimes meet.
    pub kappa_star: ExponentQ,
    pub w: Scalar,
    pub fibers: Vec<CaseFiber>,
}

fn q(n: i64, d: i64) -> ExponentQ {
    ExponentQ::new(n, d)
}

/// The bulk-deformed potential of the two-point blow-up at `u` modulo `T^trunc`.
pub fn case_potential(p: &MomentPolytope, u: &[ExponentQ], w: &Scalar, kappa: ExponentQ, mode: Mode, trunc: Order) -> Result<PotentialFunction> {
    let bulk = BulkDeformation::monomial_on(p.num_facets(), BULK_FACET, mode.coerce(w.clone())?, kappa, mode);
    fano_bulk_potential(p, u, &bulk, trunc)
}

/// Secondary equations in `(c, d)`: `c + d⁻² = 0` and the case's balance
/// of the `y₂` derivative.
fn secondary_system(case: u8, w: &Scalar, mode: Mode) -> Result<Vec<LaurentPoly>> {
    let w = mode.coerce(w.clone())?;
    let one = mode.one();
    let first = LaurentPoly::from_terms(2, mode, [(vec![1, 0], one.clone()), (vec![0, -2], one.clone())]);
    let mut second = LaurentPoly::zero(2, mode);
    match case {
        1 => {
            second.add_term(vec![1, 0], mode.int(-2));
            second.add_term(vec![0, 0], w);
        }
        2 => {
            second.add_term(vec![1, 0], mode.int(-2));
            second.add_term(vec![0, 1], one);
        }
        3 => {
            second.add_term(vec![0, 0], w);
            second.add_term(vec![0, 1], one);
        }
        4 => {
            second.add_term(vec![1, 0], mode.int(-2));
            second.add_term(vec![0, 0], w);
            second.add_term(vec![0, 1], one);
        }
        _ => unreachable!("cases are 1 to 4"),
    }
    Ok(vec![first, second])
}

fn fiber(
    p: &MomentPolytope,
    case: u8,
    u1: ExponentQ,
    beta: ExponentQ,
    mu: ExponentQ,
    w: &Scalar,
    kappa: ExponentQ,
    n: ExponentQ,
) -> Result<CaseFiber> {
    let wmode = if w.is_exact() { Mode::Exact } else { Mode::float() };
    let secondary = solve_polys(&secondary_system(case, w, wmode)?, 2);
    let expected = match case {
        1 => 2,
        3 => 1,
        _ => 3,
    };
    let u = vec![u1, beta];
    let mut lifts = Vec::new();
    for s in &secondary.solutions {
        let vals = s.scalars();
        // exact coefficients on this fine exponent grid grow too fast to lift
        let mode = Mode::float();
        let c = mode.coerce(vals[0].clone())?;
        let d = mode.coerce(vals[1].clone())?;
        let y1 = NovikovSeries::constant(mode, d);
        let y2 = NovikovSeries::from_terms(mode, [(ExponentQ::ZERO, mode.int(-1)), (mu, c)], Order::Infinite)?;
        let build = |t: Order| case_potential(p, &u, w, kappa, mode, t);
        lifts.push(lift_point_adaptive(build, &[y1, y2], n));
    }
    let multiple_root = secondary.solutions.iter().any(|s| s.multiplicity != Multiplicity::Known(1));
    Ok(CaseFiber { case, u, mu, secondary, expected, lifts, multiple_root })
}

/// Critical points of the two-point blow-up with `β = (1-α)/2` and bulk
/// `w T^κ` on the facet `u₂ = 0`, along the row `u₂ = β`. Below `κ* = α/2 - 1/6`
/// two fibers carry critical points (Cases 1 and 3), at `κ*` they merge at
/// `u₁ = 1/3` (Case 4), above it the fiber `u₁ = 1/3` keeps three (Case 2).
/// Each secondary solution is lifted, in float mode, to a critical point
/// modulo `T^n`.
pub fn case_analysis_two_point(alpha: ExponentQ, w: &Scalar, kappa: ExponentQ, n: ExponentQ) -> Result<CaseReport> {
    if !(q(1, 3) < alpha && alpha < ExponentQ::ONE) {
        return Err(Error::BadKahlerParams(format!("case analysis needs 1/3 < alpha < 1, got {alpha}")));
    }
    if !kappa.is_positive() {
        return Err(Error::BadKahlerParams(format!("kappa must be positive, got {kappa}")));
    }
    if w.is_exact_zero() || w.norm() == 0.0 {
        return Err(Error::BadKahlerParams("w must be nonzero".into()));
    }
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let p = two_point_blowup(alpha, beta)?;
    let kappa_star = alpha.div_int(2) - q(1, 6);
    let third = q(1, 3);
    let mut fibers = Vec::new();
    if kappa < kappa_star {
        let u3 = beta + kappa;
        fibers.push(fiber(&p, 3, u3, beta, ExponentQ::ONE - beta - u3.mul_int(2), w, kappa, n)?);
        let u1 = (ExponentQ::ONE + alpha).div_int(4) - kappa.div_int(2);
        fibers.push(fiber(&p, 1, u1, beta, kappa, w, kappa, n)?);
    } else if kappa == kappa_star {
        fibers.push(fiber(&p, 4, third, beta, kappa, w, kappa, n)?);
    } else {
        fibers.push(fiber(&p, 2, third, beta, third - beta, w, kappa, n)?);
    }
    Ok(CaseReport { alpha, beta, kappa, kappa_star, w: w.clone(), fibers })
}
