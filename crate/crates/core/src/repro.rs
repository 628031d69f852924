//! Golden scenarios: each runs the pipeline on a worked example and diffs the
//! outcome against known values.

use std::fmt::Display;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::{classify_fiber, row_intervals, scan, ClassifyOptions, FiberStatus, Row};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::leading::{flag_basis, leading_equations, leading_equations_from_potential, level_structure};
use crate::lifting::{case_analysis_two_point, flag_point_to_original};
use crate::novikov::{ExponentQ, Mode, NovikovSeries, Order, Scalar};
use crate::potential::{evaluate, fano_bulk_potential, gradient_residual, hessian, leading_potential, log_derivative, PotentialFunction};
use crate::solver::poly::UniPoly;
use crate::solver::{solve, Multiplicity, RESIDUAL_TOL};
use crate::toric::{cp1, k_point_blowup, one_point_blowup_monotone, two_point_blowup};
use crate::BulkDeformation;

pub const SCENARIOS: [&str; 6] = [
    "cp1-residue",
    "one-point-blowup-A2",
    "two-point-blowup-cases",
    "two-point-blowup-scan",
    "three-point-blowup-scan",
    "generalized-lte",
];

/// One compared value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub got: String,
    /// Where the expected value comes from.
    pub source: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproReport {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl ReproReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("scenario {}", self.name);
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(" ({})", ps.join(", ")));
        }
        out.push('\n');
        for c in &self.checks {
            let tag = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{tag}] {}: expected {}, got {}  ({})\n", c.label, c.expected, c.got, c.source));
        }
        let n = self.checks.len();
        let bad = self.failures().len();
        out.push_str(&format!("  {} of {n} checks passed\n", n - bad));
        out
    }
}

/// Optional overrides; each scenario reads the ones it understands.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReproParams {
    pub alpha: Option<ExponentQ>,
    pub w: Option<Scalar>,
    pub kappa: Option<ExponentQ>,
    pub step: Option<ExponentQ>,
    pub eps: Option<ExponentQ>,
    /// Lift order `N`.
    pub order: Option<ExponentQ>,
}

struct Builder {
    report: ReproReport,
}

impl Builder {
    fn new(name: &str) -> Self {
        Builder { report: ReproReport { name: name.into(), params: Vec::new(), checks: Vec::new() } }
    }

    fn param(&mut self, k: &str, v: impl Display) {
        self.report.params.push((k.into(), v.to_string()));
    }

    fn check(&mut self, label: impl Into<String>, expected: impl Display, got: impl Display, pass: bool, source: &str) {
        self.report.checks.push(Check {
            label: label.into(),
            expected: expected.to_string(),
            got: got.to_string(),
            source: source.into(),
            pass,
        });
    }

    fn eq<T: PartialEq + Display>(&mut self, label: impl Into<String>, expected: T, got: T, source: &str) {
        let pass = expected == got;
        self.check(label, expected, got, pass, source);
    }
}

fn q(n: i64, d: i64) -> ExponentQ {
    ExponentQ::new(n, d)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn series_str(s: &NovikovSeries) -> String {
    s.to_string()
}

fn alpha_of(p: &ReproParams) -> ExponentQ {
    p.alpha.unwrap_or(q(2, 5))
}

const KNOWN: &str = "worked example";

/// Run a named scenario.
pub fn run_repro(name: &str, params: &ReproParams) -> Result<ReproReport> {
    match name {
        "cp1-residue" => cp1_residue(params),
        "one-point-blowup-A2" => one_point_a2(),
        "two-point-blowup-cases" => two_point_cases(params),
        "two-point-blowup-scan" => two_point_scan(params),
        "three-point-blowup-scan" => three_point_scan(params),
        "generalized-lte" => generalized_lte(params),
        _ => Err(Error::Parse(format!("unknown scenario `{name}`; known: {}", SCENARIOS.join(", ")))),
    }
}

/// `Σ_p f(p) g(p) / Hess_p` over the given critical points.
fn residue_pairing(
    f: &PotentialFunction,
    g: &PotentialFunction,
    points: &[(Vec<NovikovSeries>, NovikovSeries)],
) -> Result<NovikovSeries> {
    let mut acc = NovikovSeries::zero(Mode::Exact);
    for (y, pairing) in points {
        let term = evaluate(f, y)?.checked_mul(&evaluate(g, y)?)?.checked_mul(pairing)?;
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

fn cp1_residue(params: &ReproParams) -> Result<ReproReport> {
    let mut b = Builder::new("cp1-residue");
    let step = params.step.unwrap_or(q(1, 20));
    b.param("step", step);
    let p = cp1();
    let half = q(1, 2);
    let reports = scan(&p, step, None, &ClassifyOptions::default())?;
    let bal: Vec<String> = reports.iter().filter(|r| r.status.is_balanced()).map(|r| r.u[0].to_string()).collect();
    let want = if half.ratio() % step.ratio() == num_rational::Rational64::zero() { "1/2" } else { "" };
    b.eq("fibers with critical points on the grid", want.to_string(), bal.join(","), KNOWN);

    let u = [half];
    let (_, _, sys) = leading_equations(&p, &u, None, None)?;
    let out = solve(&sys);
    let sols: Vec<String> = out.solutions.iter().map(|s| s.scalars()[0].to_string()).collect();
    b.eq("critical points y at u = 1/2", "-1,1".to_string(), sols.join(","), KNOWN);
    b.eq("solve certified", true, out.certified, "exhaustive univariate solve");

    let f = leading_potential(&p, &u, Mode::Exact)?;
    let mut points = Vec::new();
    for (sign, label) in [(1i64, "p+"), (-1, "p-")] {
        let y = vec![NovikovSeries::constant(Mode::Exact, Scalar::from_ratio(sign, 1))];
        let (_, gv) = gradient_residual(&f, &y)?;
        b.eq(format!("gradient at {label} vanishes exactly"), Order::Infinite, gv, "exact evaluation");
        let h = hessian(&f, &y)?;
        let want_h = NovikovSeries::monomial(Mode::Exact, Scalar::from_ratio(2 * sign, 1), half);
        b.eq(format!("Hess at {label}"), series_str(&want_h), series_str(&h.det), KNOWN);
        let want_p = NovikovSeries::monomial(Mode::Exact, Scalar::from_ratio(sign, 2), -half);
        let got_p = h.residue_self_pairing.clone().ok_or(Error::DegenerateCritical)?;
        b.eq(format!("<1_{label}, 1_{label}>"), series_str(&want_p), series_str(&got_p), KNOWN);
        points.push((y, got_p));
    }
    // T^{1/2} y is T^{1/2}(1₊ - 1₋) and the unit is 1₊ + 1₋
    let pt = PotentialFunction::from_terms(1, Mode::Exact, [(vec![1], NovikovSeries::t_pow(Mode::Exact, half))])?;
    let unit = PotentialFunction::from_terms(1, Mode::Exact, [(vec![0], NovikovSeries::one(Mode::Exact))])?;
    let cross = residue_pairing(&pt, &unit, &points)?;
    b.eq("<T^{1/2}(1+ - 1-), 1+ + 1->", series_str(&NovikovSeries::one(Mode::Exact)), series_str(&cross), KNOWN);
    Ok(b.report)
}

/// Substitute `y₂ = y₁^{-2}` and return the ascending coefficients in `y₁`,
/// or `None` if they are not exact or have negative degree.
fn reduce_to_y1(e: &LaurentPoly) -> Option<Vec<BigRational>> {
    let mut deg = std::collections::BTreeMap::new();
    for (x, c) in e.terms() {
        let k = x[0] - 2 * x[1];
        let r = c.as_rational()?.clone();
        *deg.entry(k).or_insert_with(BigRational::zero) += r;
    }
    let lo = *deg.keys().next()?;
    if lo < 0 {
        return None;
    }
    let hi = *deg.keys().last()?;
    Some((0..=hi).map(|k| deg.get(&k).cloned().unwrap_or_else(BigRational::zero)).collect())
}

fn one_point_a2() -> Result<ReproReport> {
    let mut b = Builder::new("one-point-blowup-A2");
    let m = Mode::Exact;
    let c = rat(-27, 256);
    b.param("c", "-27/256");
    let p = one_point_blowup_monotone();
    let u = [q(1, 3), q(1, 3)];
    // bulk (log c) on the facet u₂ = 0
    let bulk = BulkDeformation::log_unit_on(p.num_facets(), 1, Scalar::Exact(c.clone()), m);
    let f = fano_bulk_potential(&p, &u, &bulk, Order::Infinite)?;
    let third = q(1, 3);
    let mut want = PotentialFunction::zero(2, m);
    for (v, k) in [(vec![1, 0], BigRational::one()), (vec![0, 1], c.clone()), (vec![0, -1], BigRational::one()), (vec![-1, -1], BigRational::one())] {
        want.add_term(v, NovikovSeries::monomial(m, Scalar::Exact(k), third))?;
    }
    b.eq("potential T^{1/3}(y1 + c y2 + 1/y2 + 1/(y1 y2))", true, f == want, KNOWN);

    // y_k ∂F/∂y_k divided by T^{1/3} y_k
    let crit: Vec<LaurentPoly> = (0..2)
        .map(|k| {
            let d = log_derivative(&f, k);
            let mut e = LaurentPoly::zero(2, m);
            for (v, s) in d.terms() {
                let mut v = v.clone();
                v[k] -= 1;
                e.add_term(v, s.coeff(third));
            }
            e
        })
        .collect();
    // ∂/∂y₁ = 1 - y₁⁻²y₂⁻¹ forces y₂ = y₁⁻²
    let first = LaurentPoly::from_terms(2, m, [(vec![0, 0], Scalar::from_ratio(1, 1)), (vec![-2, -1], Scalar::from_ratio(-1, 1))]);
    b.eq("first critical equation", first.to_string(), crit[0].to_string(), KNOWN);
    let reduced = reduce_to_y1(&crit[1]).ok_or_else(|| Error::OutOfScope("reduced equation is not an exact polynomial".into()))?;
    let want_red = vec![c.clone(), BigRational::zero(), BigRational::zero(), -BigRational::one(), -BigRational::one()];
    let show = |v: &[BigRational]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    b.eq("reduced equation c - y1^4 - y1^3 (ascending)", show(&want_red), show(&reduced), KNOWN);
    let sqf = UniPoly::new(reduced.clone()).squarefree();
    let root = UniPoly::new(vec![rat(3, 4), BigRational::one()]);
    let mult = sqf.iter().find(|(g, _)| *g == root).map_or(0, |(_, k)| *k);
    b.eq("multiplicity of y1 = -3/4", 2, mult, KNOWN);
    let y = rat(-3, 4);
    let lhs = &y * &y * &y * &y + &y * &y * &y;
    b.eq("(-3/4)^4 + (-3/4)^3", c.to_string(), lhs.to_string(), "exact rational arithmetic");

    // the solver on the leading system read off the deformed potential
    let ls = level_structure(&p, &u)?;
    let fb = flag_basis(&ls)?;
    let sys = leading_equations_from_potential(&f, &ls, &fb, None)?;
    let out = solve(&sys);
    let mut found = None;
    for s in &out.solutions {
        let y = flag_point_to_original(&fb, &s.scalars())?;
        if (y[0].to_complex() - num_complex::Complex64::new(-0.75, 0.0)).norm() < 1e-6 {
            found = Some((y, s.multiplicity));
        }
    }
    let (yc, mult) = found
        .map(|(y, mu)| (y, mu))
        .unwrap_or((vec![Scalar::from_ratio(0, 1); 2], Multiplicity::Known(0)));
    b.eq("solver multiplicity at y1 = -3/4", format!("{:?}", Multiplicity::Known(2)), format!("{mult:?}"), KNOWN);
    let total: usize = out
        .solutions
        .iter()
        .map(|s| match s.multiplicity {
            Multiplicity::Known(k) => k,
            Multiplicity::Unknown => 1,
        })
        .sum();
    b.eq("solutions with multiplicity", 4, total, "degree of the reduced equation");

    let y_exact = vec![
        NovikovSeries::constant(m, Scalar::Exact(rat(-3, 4))),
        NovikovSeries::constant(m, Scalar::Exact(rat(16, 9))),
    ];
    b.eq("y2 = y1^-2 at the double root", "16/9".to_string(), yc[1].to_string(), "y2 = y1^-2");
    let (_, gv) = gradient_residual(&f, &y_exact)?;
    b.eq("gradient at (-3/4, 16/9) vanishes exactly", Order::Infinite, gv, "exact evaluation");
    let h = hessian(&f, &y_exact)?;
    b.eq("Hessian degenerate", true, h.degenerate && h.leading_degenerate, KNOWN);
    Ok(b.report)
}

fn two_point_cases(params: &ReproParams) -> Result<ReproReport> {
    let mut b = Builder::new("two-point-blowup-cases");
    let alpha = alpha_of(params);
    let w = params.w.clone().unwrap_or(Scalar::from_ratio(1, 1));
    let n = params.order.unwrap_or(q(2, 1));
    b.param("alpha", alpha);
    b.param("w", &w);
    b.param("N", n);
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let kappa_star = alpha.div_int(2) - q(1, 6);
    let kappas = match params.kappa {
        Some(k) => {
            b.param("kappa", k);
            vec![k]
        }
        None => {
            b.param("kappa", format!("1/100, 1/10, {kappa_star}"));
            vec![q(1, 100), q(1, 10), kappa_star]
        }
    };
    for kappa in kappas {
        let r = case_analysis_two_point(alpha, &w, kappa, n)?;
        // the fibers each regime predicts, with their solution counts
        let expected: Vec<(u8, ExponentQ, usize)> = if kappa < kappa_star {
            vec![(3, beta + kappa, 1), (1, (ExponentQ::ONE + alpha).div_int(4) - kappa.div_int(2), 2)]
        } else if kappa == kappa_star {
            vec![(4, q(1, 3), 3)]
        } else {
            vec![(2, q(1, 3), 3)]
        };
        let got: Vec<String> = r.fibers.iter().map(|f| format!("case {} at u1={}", f.case, f.u[0])).collect();
        let want: Vec<String> = expected.iter().map(|(c, u, _)| format!("case {c} at u1={u}")).collect();
        b.eq(format!("kappa={kappa}: fibers"), want.join("; "), got.join("; "), "regime of kappa against alpha/2 - 1/6");
        for (f, (case, _, count)) in r.fibers.iter().zip(&expected) {
            let tag = format!("kappa={kappa} case {case}");
            b.eq(format!("{tag}: solutions"), *count, f.solution_count(), KNOWN);
            let worst = f.secondary.solutions.iter().map(|s| s.residual).fold(0.0, f64::max);
            b.check(format!("{tag}: secondary residual"), format!("< {RESIDUAL_TOL:e}"), format!("{worst:.1e}"), worst < RESIDUAL_TOL, "solver");
            let lifts = f.lifts.len();
            b.eq(format!("{tag}: lifts certified to N={n}"), lifts, f.certified_lifts(), "certified gradient valuation");
            for l in f.lifts.iter().flatten() {
                b.check(
                    format!("{tag}: lift residual valuation"),
                    format!(">= {n}"),
                    l.residual_valuation,
                    l.residual_valuation >= Order::Finite(n),
                    "certified gradient valuation",
                );
            }
        }
        if alpha == q(2, 5) && w == Scalar::from_ratio(1, 1) && kappa == q(1, 100) {
            let u: Vec<String> = r.fibers.iter().map(|f| f.u[0].to_string()).collect();
            b.eq("kappa=1/100: fiber positions", "31/100,69/200".to_string(), u.join(","), "(1+alpha)/4 - kappa/2 and beta + kappa");
        }
        if kappa == kappa_star {
            // w³ = -27/2 makes d̄²(d̄ + w) + 2 = 0 acquire a double root
            let wd = Scalar::complex(-(13.5f64.cbrt()), 0.0);
            let r = case_analysis_two_point(alpha, &wd, kappa, n)?;
            let f = &r.fibers[0];
            b.eq("w^3=-27/2: double root detected", true, f.multiple_root, KNOWN);
            b.eq("w^3=-27/2: distinct solutions", 2, f.secondary.solutions.len(), KNOWN);
            b.eq("w^3=-27/2: solutions with multiplicity", 3, f.solution_count(), KNOWN);
        }
    }
    Ok(b.report)
}

fn flag_system_ok(p: &crate::MomentPolytope, u: &[ExponentQ]) -> Result<(bool, bool)> {
    let (_, _, sys) = leading_equations(p, u, None, None)?;
    let m = Mode::Exact;
    let one = Scalar::from_ratio(1, 1);
    // flag variables (y₂, y₁)
    let e1 = LaurentPoly::from_terms(2, m, [(vec![0, 0], one.clone()), (vec![-2, 0], Scalar::from_ratio(-1, 1))]);
    let e2 = LaurentPoly::from_terms(2, m, [(vec![0, 0], one.clone()), (vec![1, 0], one)]);
    let polys = sys.polys();
    let same = polys == vec![e1, e2];
    let out = solve(&sys);
    let solved = out.certified
        && out.solutions.len() == 1
        && out.solutions[0].scalars()[0] == Scalar::from_ratio(-1, 1)
        && out.solutions[0].free == vec![1];
    Ok((same, solved))
}

fn two_point_scan(params: &ReproParams) -> Result<ReproReport> {
    let mut b = Builder::new("two-point-blowup-scan");
    let alpha = alpha_of(params);
    let step = params.step.unwrap_or(q(1, 200));
    b.param("alpha", alpha);
    b.param("step", step);
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let upper = (ExponentQ::ONE + alpha).div_int(4);
    let p = two_point_blowup(alpha, beta)?;
    let row = Row { axis: 1, value: beta };
    let reports = scan(&p, step, Some(row), &ClassifyOptions::default())?;
    let inside: Vec<ExponentQ> = reports.iter().map(|r| r.u[0]).filter(|x| beta < *x && *x < upper).collect();
    let mut with_sys = Vec::new();
    let mut solve_ok = 0;
    for r in &reports {
        let (a, s) = flag_system_ok(&p, &r.u)?;
        if a {
            with_sys.push(r.u[0]);
            solve_ok += s as usize;
        }
    }
    let show = |v: &[ExponentQ]| match (v.first(), v.last()) {
        (Some(lo), Some(hi)) => format!("{} points in [{lo}, {hi}]", v.len()),
        _ => "none".into(),
    };
    b.eq("grid points with system {1 - y2^-2, 1 + y2}", show(&inside), show(&with_sys), "beta < u1 < (1+alpha)/4");
    b.eq("of these, solved by y2 = -1, y1 free, certified", with_sys.len(), solve_ok, KNOWN);
    let iv = row_intervals(&reports, step, 0);
    let covering = inside.first().and_then(|lo| iv.iter().find(|(_, a, c)| a <= lo && inside.last().is_some_and(|hi| hi <= c)));
    let got = match covering {
        Some((_, lo, hi)) => format!("run [{lo}, {hi}]"),
        None => "no single run".into(),
    };
    b.check("balanced run covers those points", show(&inside), &got, covering.is_some(), "bulk-balanced on the open interval");
    Ok(b.report)
}

fn three_point_scan(params: &ReproParams) -> Result<ReproReport> {
    let mut b = Builder::new("three-point-blowup-scan");
    let alpha = alpha_of(params);
    let eps = params.eps.unwrap_or(q(1, 50));
    let steps = match params.step {
        Some(s) => vec![s],
        None => vec![q(1, 40), q(1, 200)],
    };
    b.param("alpha", alpha);
    b.param("eps", eps);
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let two = two_point_blowup(alpha, beta)?;
    let three = k_point_blowup(alpha, &[eps])?;
    let row = Row { axis: 1, value: beta };
    let show = |iv: &[(Vec<ExponentQ>, ExponentQ, ExponentQ)]| {
        iv.iter().map(|(_, lo, hi)| format!("[{lo}, {hi}]")).collect::<Vec<_>>().join(" ")
    };
    for step in steps {
        let r2 = scan(&two, step, Some(row), &ClassifyOptions::default())?;
        let r3 = scan(&three, step, Some(row), &ClassifyOptions::default())?;
        let i2 = row_intervals(&r2, step, 0);
        let i3 = row_intervals(&r3, step, 0);
        b.eq(format!("step {step}: balanced interval matches two points"), show(&i2), show(&i3), "same leading system");
        let fully = r3.iter().filter(|r| r.status == FiberStatus::BulkBalanced).count();
        b.check(format!("step {step}: balanced points found"), "> 0", fully, fully > 0, "nonempty interval");
    }
    Ok(b.report)
}

fn generalized_lte(params: &ReproParams) -> Result<ReproReport> {
    let mut b = Builder::new("generalized-lte");
    let alpha = alpha_of(params);
    b.param("alpha", alpha);
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let p = two_point_blowup(alpha, beta)?;
    let u = [beta, beta];
    let coeffs = |c: &Scalar| {
        let mut v = vec![Scalar::from_ratio(1, 1); p.num_facets()];
        v[1] = c.clone();
        v
    };
    for (cn, cd) in [(2, 1), (-1, 1), (1, 2)] {
        let c = Scalar::from_ratio(cn, cd);
        let cs = coeffs(&c);
        let (_, fb, sys) = leading_equations(&p, &u, None, Some(&cs))?;
        let out = solve(&sys);
        let got: Vec<String> = out
            .solutions
            .iter()
            .map(|s| flag_point_to_original(&fb, &s.scalars()).map(|y| format!("({}, {})", y[0], y[1])))
            .collect::<Result<_>>()?;
        let want = format!("({}, -1)", Scalar::Exact(rat(1, 1) - rat(cn, cd)));
        b.eq(format!("c={c}: solutions"), want, got.join(" "), KNOWN);
        b.eq(format!("c={c}: certified"), true, out.certified, "exhaustive solve");
    }
    let opts = ClassifyOptions { lift_order: None, coeffs: Some(coeffs(&Scalar::from_ratio(1, 1))) };
    let r = classify_fiber(&p, &u, &opts)?;
    b.eq(
        "c=1: status",
        FiberStatus::NoSolutionFound { certified: true }.label().to_string() + " (certified)",
        format!("{}{}", r.status.label(), if r.status == (FiberStatus::NoSolutionFound { certified: true }) { " (certified)" } else { "" }),
        "the solution would need y1 = 0",
    );
    // approaching c = 1 the solution runs into y1 = 0
    let mut ys = Vec::new();
    for k in 1..=4 {
        let c = Scalar::Exact(rat(1, 1) + rat(1, 10i64.pow(k)));
        let (_, fb, sys) = leading_equations(&p, &u, None, Some(&coeffs(&c)))?;
        let out = solve(&sys);
        let y1 = match out.solutions.first() {
            Some(s) => flag_point_to_original(&fb, &s.scalars())?[0].to_string(),
            None => "none".into(),
        };
        ys.push(y1);
    }
    b.eq("y1 as c -> 1 (c = 1 + 10^-k)", "-1/10,-1/100,-1/1000,-1/10000".to_string(), ys.join(","), "y1 = 1 - c");
    Ok(b.report)
}
