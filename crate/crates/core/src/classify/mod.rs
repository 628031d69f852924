//! Bulk-balancedness of fibers, threshold bounds and grid scans.

mod scan;

pub use scan::{grid_points, row_intervals, scan, Row, ScanSummary};

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::leading::leading_equations;
use crate::lifting::lift_bulk;
use crate::novikov::{ExponentQ, Order, Scalar};
use crate::solver::{solve, LeadingSolution, SolveOutcome, SolvePath};
use crate::toric::MomentPolytope;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberStatus {
    /// The full leading system has a solution.
    BulkBalanced,
    /// Levels `≤ l0` are solvable, level `l0 + 1` is not; `certified` when
    /// that failure comes from an exhaustive solve.
    PartialUpTo { l0: usize, certified: bool },
    /// Already the first level has no solution.
    NoSolutionFound { certified: bool },
    NoFullFlag,
}

impl FiberStatus {
    pub fn label(&self) -> &'static str {
        match self {
            FiberStatus::BulkBalanced => "bulk-balanced",
            FiberStatus::PartialUpTo { .. } => "partial",
            FiberStatus::NoSolutionFound { .. } => "no-solution",
            FiberStatus::NoFullFlag => "no-full-flag",
        }
    }

    pub fn is_balanced(&self) -> bool {
        *self == FiberStatus::BulkBalanced
    }
}

/// Outcome of the optional bulk lift of the first witness.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftCheck {
    pub target: ExponentQ,
    pub residual_valuation: Order,
    pub certified: bool,
    pub steps: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassifyOptions {
    /// Verify a witness by lifting it to a bulk critical point modulo `T^N`.
    pub lift_order: Option<ExponentQ>,
    /// Facet coefficients of generalized leading equations.
    pub coeffs: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberReport {
    pub u: Vec<ExponentQ>,
    pub n: usize,
    pub status: FiberStatus,
    /// `S_{l0+1}` for the first obstructed level, `+∞` when balanced.
    pub threshold_bound: Order,
    /// `S_l` of every level.
    pub levels: Vec<ExponentQ>,
    pub var_names: Vec<String>,
    /// Solutions of the full system, or of the largest solvable prefix.
    pub witnesses: Vec<LeadingSolution>,
    pub path: Option<SolvePath>,
    pub lift: Option<LiftCheck>,
    pub notes: Vec<String>,
}

impl FiberReport {
    /// `2ⁿ`, the lower bound on `#(ψ(L) ∩ L)` for a balanced fiber.
    pub fn intersection_bound(&self) -> Option<u64> {
        self.status.is_balanced().then(|| 1u64 << self.n)
    }
}

fn outcome_solvable(o: &SolveOutcome) -> bool {
    !o.solutions.is_empty()
}

/// Classify the fiber over `u`: solve the full leading system, and when it
/// has no solution find the largest solvable prefix of levels.
pub fn classify_fiber(p: &MomentPolytope, u: &[ExponentQ], opts: &ClassifyOptions) -> Result<FiberReport> {
    let coeffs = opts.coeffs.as_deref();
    let (ls, _, sys) = leading_equations(p, u, None, coeffs)?;
    let levels: Vec<ExponentQ> = ls.levels.iter().map(|l| l.s).collect();
    let mut report = FiberReport {
        u: u.to_vec(),
        n: p.n,
        status: FiberStatus::NoFullFlag,
        threshold_bound: Order::Infinite,
        levels,
        var_names: sys.var_names(),
        witnesses: Vec::new(),
        path: None,
        lift: None,
        notes: Vec::new(),
    };
    let Some(k) = ls.k_full else {
        report.notes.push("normals of the levels never span the full space".into());
        return Ok(report);
    };
    let full = solve(&sys);
    report.path = Some(full.path);
    report.notes.extend(full.notes.iter().cloned());
    if outcome_solvable(&full) {
        report.status = FiberStatus::BulkBalanced;
        report.witnesses = full.solutions;
        if !full.certified {
            report.notes.push("solution set may be incomplete; witnesses are residual-verified".into());
        }
        if let Some(n) = opts.lift_order {
            report.lift = Some(lift_check(p, u, &report.witnesses[0], n));
        }
        return Ok(report);
    }
    // largest solvable prefix below the full system
    let mut failed = full;
    let mut l0 = 0;
    for l in (1..k).rev() {
        let (_, _, part) = leading_equations(p, u, Some(l), coeffs)?;
        let o = solve(&part);
        if outcome_solvable(&o) {
            l0 = l;
            report.witnesses = o.solutions;
            break;
        }
        failed = o;
    }
    report.threshold_bound = Order::Finite(ls.s(l0 + 1));
    report.status = if l0 == 0 {
        FiberStatus::NoSolutionFound { certified: failed.certified }
    } else {
        FiberStatus::PartialUpTo { l0, certified: failed.certified }
    };
    Ok(report)
}

fn lift_check(p: &MomentPolytope, u: &[ExponentQ], w: &LeadingSolution, n: ExponentQ) -> LiftCheck {
    let y = w.scalars();
    match lift_bulk(p, u, &y, n, &[]) {
        Ok(l) => LiftCheck {
            target: n,
            residual_valuation: l.residual_valuation,
            certified: l.certified(),
            steps: l.steps.len(),
            error: None,
        },
        Err(e) => LiftCheck {
            target: n,
            residual_valuation: Order::Finite(ExponentQ::ZERO),
            certified: false,
            steps: 0,
            error: Some(e.to_string()),
        },
    }
}

/// Quantitative consequences of a report. Energies are given in area units
/// (`ω(β)/2π`) and in physical units (times `2π`).
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    pub status: FiberStatus,
    pub intersection_bound: Option<u64>,
    pub threshold: Order,
    pub threshold_physical: Option<f64>,
    /// Lower bound on the displacement energy, physical units; `None` means
    /// no finite bound (the fiber is not displaceable).
    pub displacement_energy_physical: Option<f64>,
}

pub fn report_bounds(fr: &FiberReport) -> Bounds {
    let physical = fr.threshold_bound.finite().map(|s| TAU * s.to_f64());
    Bounds {
        status: fr.status.clone(),
        intersection_bound: fr.intersection_bound(),
        threshold: fr.threshold_bound,
        threshold_physical: physical,
        displacement_energy_physical: physical,
    }
}

impl Bounds {
    pub fn to_text(&self) -> String {
        let mut out = format!("status: {}\n", self.status.label());
        match self.intersection_bound {
            Some(b) => out.push_str(&format!("#(psi(L) ∩ L) >= {b} for every Hamiltonian psi in general position\n")),
            None => out.push_str("intersection bound: not available\n"),
        }
        match self.threshold {
            Order::Infinite => out.push_str("threshold: +inf (leading system fully solvable)\ndisplacement energy: +inf\n"),
            Order::Finite(s) => {
                let ph = TAU * s.to_f64();
                out.push_str(&format!("threshold: {s} (area units) = {ph:.6} (physical)\n"));
                out.push_str(&format!("displacement energy >= 2pi * {s} = {ph:.6}\n"));
            }
        }
        out
    }
}

pub(crate) fn check_step(step: ExponentQ) -> Result<()> {
    if step.is_positive() {
        Ok(())
    } else {
        Err(Error::BadStep(step))
    }
}
