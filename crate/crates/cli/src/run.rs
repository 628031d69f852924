use std::error::Error as StdError;
use std::fmt::Write as _;

use serde_json::{json, Value};
use toricpo_core::classify::{classify_fiber, report_bounds, row_intervals, scan, ClassifyOptions, FiberStatus, Row};
use toricpo_core::io::{
    bulk_from_json, bulk_lift_json, canonical, envelope, fiber_json, levels_json, outcome_json, point_lift_json, polytope_from_json,
    polytope_json, potential_json, repro_json, system_json,
};
use toricpo_core::leading::leading_equations;
use toricpo_core::lifting::{flag_point_to_original, lift_bulk, lift_point_adaptive};
use toricpo_core::novikov::{parse_scalar, DEFAULT_TOL};
use toricpo_core::potential::{fano_bulk_potential, leading_potential};
use toricpo_core::repro::{run_repro, ReproParams, SCENARIOS};
use toricpo_core::solver::solve;
use toricpo_core::toric::{build_example, validate};
use toricpo_core::{BulkDeformation, Error, ExponentQ, MomentPolytope, Mode, NovikovSeries, Order, PotentialFunction, Scalar};

use crate::args::{Cli, Cmd, FiberArgs, LiftCmd, ModeArg, PolytopeCmd};

type R<T> = Result<T, Box<dyn StdError>>;

pub struct Output {
    pub text: String,
    pub code: u8,
}

/// Exit status for results that are valid but not certified.
const UNCERTIFIED: u8 = 2;

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn mode(&self) -> Mode {
        match self.cli.mode {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float { tol: self.cli.tol.unwrap_or(DEFAULT_TOL) },
        }
    }

    fn trunc(&self) -> R<Order> {
        Ok(match &self.cli.trunc {
            Some(t) => t.parse::<Order>()?,
            None => Order::Infinite,
        })
    }

    fn emit(&self, kind: &str, text: String, value: Value, certified: bool) -> Output {
        let code = if self.cli.require_certified && !certified { UNCERTIFIED } else { 0 };
        let text = if self.cli.json { canonical(&envelope(kind, value)) + "\n" } else { text };
        Output { text, code }
    }
}

fn rationals(s: &str) -> R<Vec<ExponentQ>> {
    s.split(',').map(|x| x.trim().parse::<ExponentQ>().map_err(Into::into)).collect()
}

fn scalars(s: &str) -> R<Vec<Scalar>> {
    s.split(',').map(|x| parse_scalar(x).map_err(Into::into)).collect()
}

/// A JSON file, or `example:NAME[:P1,P2,..]`.
fn load_polytope(spec: &str) -> R<MomentPolytope> {
    if let Some(rest) = spec.strip_prefix("example:") {
        let (name, params) = match rest.split_once(':') {
            Some((n, ps)) => (n, rationals(ps)?),
            None => (rest, Vec::new()),
        };
        return Ok(build_example(name, &params)?);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{spec}: {e}"))?;
    let p = polytope_from_json(&v)?;
    let rep = validate(&p);
    if !rep.valid {
        return Err(Error::InvalidPolytope(format!("{:?}", rep.failures)).into());
    }
    Ok(p)
}

fn load_fiber(f: &FiberArgs) -> R<(MomentPolytope, Vec<ExponentQ>)> {
    let p = load_polytope(&f.polytope)?;
    let u = rationals(&f.u)?;
    if u.len() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: u.len() }.into());
    }
    if !p.is_interior(&u)? {
        return Err(Error::NotInterior.into());
    }
    Ok((p, u))
}

/// Inline JSON or a path to a JSON file.
fn json_arg(s: &str) -> R<Value> {
    let t = s.trim_start();
    let text = if t.starts_with('[') || t.starts_with('{') { s.to_string() } else { std::fs::read_to_string(s)? };
    Ok(serde_json::from_str(&text)?)
}

fn load_bulk(s: Option<&str>, p: &MomentPolytope, mode: Mode) -> R<BulkDeformation> {
    match s {
        Some(s) => Ok(bulk_from_json(&json_arg(s)?, p.num_facets(), mode)?),
        None => Ok(BulkDeformation::zero(p.num_facets(), mode)),
    }
}

fn build_potential(p: &MomentPolytope, u: &[ExponentQ], bulk: &BulkDeformation, mode: Mode, trunc: Order) -> R<PotentialFunction> {
    if p.fano {
        return Ok(fano_bulk_potential(p, u, bulk, trunc)?);
    }
    if !bulk.entries.iter().all(|e| e.is_zero()) {
        return Err(Error::NotFano.into());
    }
    Ok(leading_potential(p, u, mode)?.truncate(trunc))
}

/// A series with at most `BRIEF_TERMS` terms shown.
fn brief(s: &NovikovSeries) -> String {
    if s.len() <= BRIEF_TERMS {
        return s.to_string();
    }
    let head = NovikovSeries::new(s.mode(), s.terms()[..BRIEF_TERMS].iter().cloned(), Order::Infinite);
    format!("{head} + ... ({} terms) mod T^{}", s.len(), s.trunc())
}

const BRIEF_TERMS: usize = 6;

fn energy_line(label: &str, s: Order) -> String {
    match s {
        Order::Finite(e) => format!("{label}: {e} (area units) = {:.6} (physical)\n", std::f64::consts::TAU * e.to_f64()),
        Order::Infinite => format!("{label}: +inf\n"),
    }
}

pub fn run(cli: &Cli) -> R<Output> {
    let ctx = Ctx { cli };
    match &cli.cmd {
        Cmd::Polytope(c) => polytope(&ctx, c),
        Cmd::Potential(a) => {
            let (p, u) = load_fiber(&a.fiber)?;
            let mode = ctx.mode();
            let bulk = load_bulk(a.bulk.as_deref(), &p, mode)?;
            let f = build_potential(&p, &u, &bulk, mode, ctx.trunc()?)?;
            let ells = p.ell_values(&u)?;
            let mut text = format!("potential of {} at u = ({}), mod T^{}\n", p.name, a.fiber.u, f.trunc());
            for (v, c) in f.terms() {
                let _ = writeln!(text, "  y^{v:?}  {c}");
            }
            let _ = writeln!(text, "facet values l_i(u): {}", ells.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
            let v = json!({"polytope": p.name, "u": u, "ell": ells, "potential": potential_json(&f)});
            Ok(ctx.emit("potential", text, v, true))
        }
        Cmd::Leading(a) => {
            let (p, u) = load_fiber(&a.fiber)?;
            let coeffs = a.coeffs.as_deref().map(scalars).transpose()?;
            let (ls, fb, sys) = leading_equations(&p, &u, a.cutoff, coeffs.as_deref())?;
            let names = sys.var_names();
            let mut text = String::new();
            for (k, l) in ls.levels.iter().enumerate() {
                let facets: Vec<String> = l.members.iter().map(|(i, v)| format!("{i}:{v:?}")).collect();
                let _ = writeln!(text, "level {} S = {}  d = {}  facets {}", k + 1, l.s, ls.d[k], facets.join(" "));
            }
            let _ = writeln!(text, "full flag at level: {}", ls.k_full.map_or("none".into(), |k| k.to_string()));
            let _ = writeln!(text, "flag basis: {:?}", fb.basis);
            for e in &sys.equations {
                let _ = writeln!(text, "  [l={} s={}] {} = 0", e.level, e.s, e.poly.display_with(&names));
            }
            let v = json!({"levels": levels_json(&ls), "flag_basis": serde_json::to_value(&fb)?, "system": system_json(&sys)});
            Ok(ctx.emit("leading", text, v, true))
        }
        Cmd::Solve(a) => {
            let (p, u) = load_fiber(&a.fiber)?;
            let coeffs = a.coeffs.as_deref().map(scalars).transpose()?;
            let (ls, fb, sys) = leading_equations(&p, &u, a.cutoff, coeffs.as_deref())?;
            let out = solve(&sys);
            let names = sys.var_names();
            let full = ls.k_full.is_some() && sys.nvars() == p.n;
            let mut text = format!("{} solution(s), certified: {}, path: {:?}\n", out.solutions.len(), out.certified, out.path);
            let mut original = Vec::new();
            for s in &out.solutions {
                let vals: Vec<String> = names.iter().zip(s.scalars()).map(|(n, v)| format!("{n} = {v}")).collect();
                let _ = write!(text, "  {}  multiplicity {:?}  residual {:.1e}", vals.join(", "), s.multiplicity, s.residual);
                if !s.free.is_empty() {
                    let _ = write!(text, "  free {:?}", s.free.iter().map(|k| names[*k].clone()).collect::<Vec<_>>());
                }
                if full {
                    let y = flag_point_to_original(&fb, &s.scalars())?;
                    let _ = write!(text, "  original ({})", y.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
                    original.push(y.iter().map(toricpo_core::io::scalar_json).collect::<Vec<_>>());
                }
                text.push('\n');
            }
            for n in &out.notes {
                let _ = writeln!(text, "note: {n}");
            }
            let certified = out.certified;
            let v = json!({"system": system_json(&sys), "outcome": outcome_json(&out), "original": original});
            Ok(ctx.emit("solve", text, v, certified))
        }
        Cmd::Lift(c) => lift(&ctx, c),
        Cmd::Classify(a) => {
            let (p, u) = load_fiber(&a.fiber)?;
            let opts = ClassifyOptions {
                lift_order: a.lift_order.as_deref().map(str::parse::<ExponentQ>).transpose()?,
                coeffs: a.coeffs.as_deref().map(scalars).transpose()?,
            };
            let r = classify_fiber(&p, &u, &opts)?;
            let mut text = format!("fiber u = ({}) of {}\n", a.fiber.u, p.name);
            let _ = writeln!(text, "levels S_l: {}", r.levels.iter().map(ToString::to_string).collect::<Vec<_>>().join(" < "));
            for w in &r.witnesses {
                let vals: Vec<String> = r.var_names.iter().zip(w.scalars()).map(|(n, v)| format!("{n} = {v}")).collect();
                let _ = writeln!(text, "witness: {}", vals.join(", "));
            }
            text.push_str(&report_bounds(&r).to_text());
            if let Some(l) = &r.lift {
                let _ = writeln!(text, "lift to T^{}: residual valuation {}, certified {}", l.target, l.residual_valuation, l.certified);
            }
            for n in &r.notes {
                let _ = writeln!(text, "note: {n}");
            }
            let certified = match r.status {
                FiberStatus::PartialUpTo { certified, .. } | FiberStatus::NoSolutionFound { certified } => certified,
                _ => true,
            } && r.lift.as_ref().is_none_or(|l| l.certified);
            Ok(ctx.emit("classify", text, fiber_json(&r), certified))
        }
        Cmd::Scan(a) => {
            let p = load_polytope(&a.polytope)?;
            let step: ExponentQ = a.step.parse()?;
            let row = a.row.as_deref().map(Row::parse).transpose()?;
            let reports = scan(&p, step, row, &ClassifyOptions::default())?;
            let axis = 0;
            let iv = row_intervals(&reports, step, axis);
            let mut text = String::new();
            for r in &reports {
                let u: Vec<String> = r.u.iter().map(ToString::to_string).collect();
                let _ = write!(text, "u = ({})  {}", u.join(", "), r.status.label());
                text.push_str(&energy_line("  threshold", r.threshold_bound).replace('\n', ""));
                text.push('\n');
            }
            let balanced = reports.iter().filter(|r| r.status.is_balanced()).count();
            let _ = writeln!(text, "{balanced} of {} grid points bulk-balanced", reports.len());
            for (rest, lo, hi) in &iv {
                let rest: Vec<String> = rest.iter().map(ToString::to_string).collect();
                let _ = writeln!(text, "balanced run along u1: [{lo}, {hi}] at ({})", rest.join(", "));
            }
            let points: Vec<Value> = reports
                .iter()
                .map(|r| json!({"u": r.u, "status": r.status.label(), "threshold": r.threshold_bound.to_string()}))
                .collect();
            let ivs: Vec<Value> = iv.iter().map(|(rest, lo, hi)| json!({"rest": rest, "first": lo, "last": hi})).collect();
            let v = json!({"step": step, "points": points, "balanced": balanced, "intervals": ivs});
            Ok(ctx.emit("scan", text, v, true))
        }
        Cmd::Repro(a) => {
            let opt = |s: &Option<String>| s.as_deref().map(str::parse::<ExponentQ>).transpose();
            let params = ReproParams {
                alpha: opt(&a.alpha)?,
                w: a.w.as_deref().map(parse_scalar).transpose()?,
                kappa: opt(&a.kappa)?,
                step: opt(&a.step)?,
                eps: opt(&a.eps)?,
                order: opt(&a.order)?,
            };
            let names: Vec<&str> = if a.name == "all" { SCENARIOS.to_vec() } else { vec![a.name.as_str()] };
            let mut reports = Vec::new();
            for n in names {
                reports.push(run_repro(n, &params)?);
            }
            let passed = reports.iter().all(|r| r.passed());
            let text: String = reports.iter().map(|r| r.to_text()).collect();
            let v = json!({"passed": passed, "scenarios": reports.iter().map(repro_json).collect::<Vec<_>>()});
            let mut out = ctx.emit("repro", text, v, true);
            if !passed {
                out.code = UNCERTIFIED;
            }
            Ok(out)
        }
    }
}

fn polytope(ctx: &Ctx, c: &PolytopeCmd) -> R<Output> {
    match c {
        PolytopeCmd::Validate { polytope } => {
            let p = match polytope.strip_prefix("example:") {
                Some(_) => load_polytope(polytope)?,
                None => {
                    let text = std::fs::read_to_string(polytope).map_err(|e| format!("cannot read {polytope}: {e}"))?;
                    polytope_from_json(&serde_json::from_str(&text)?)?
                }
            };
            let rep = validate(&p);
            let mut text = format!("{}: {}\n", p.name, if rep.valid { "valid" } else { "invalid" });
            for v in &rep.vertices {
                let pt: Vec<String> = v.point.iter().map(ToString::to_string).collect();
                let _ = writeln!(text, "  vertex ({})  facets {:?}", pt.join(", "), v.active);
            }
            for f in &rep.failures {
                let _ = writeln!(text, "  failure: {f:?}");
            }
            let v = json!({"polytope": polytope_json(&p), "report": serde_json::to_value(&rep)?});
            let mut out = ctx.emit("polytope-validate", text, v, true);
            if !rep.valid {
                out.code = 1;
            }
            Ok(out)
        }
        PolytopeCmd::Example { name, params } => {
            let ps = params.as_deref().map(rationals).transpose()?.unwrap_or_default();
            let p = build_example(name, &ps)?;
            let text = canonical(&polytope_json(&p)) + "\n";
            Ok(ctx.emit("polytope", text, polytope_json(&p), true))
        }
    }
}

fn lift(ctx: &Ctx, c: &LiftCmd) -> R<Output> {
    match c {
        LiftCmd::Bulk { fiber, solution, order } => {
            let (p, u) = load_fiber(fiber)?;
            let n: ExponentQ = order.parse()?;
            let y = match solution {
                Some(s) => scalars(s)?,
                None => {
                    let (_, _, sys) = leading_equations(&p, &u, None, None)?;
                    let out = solve(&sys);
                    match out.solutions.first() {
                        Some(s) => s.scalars(),
                        None => {
                            return Ok(Output { text: "no leading solution to lift\n".into(), code: UNCERTIFIED });
                        }
                    }
                }
            };
            let l = lift_bulk(&p, &u, &y, n, &[])?;
            let mut text = format!("bulk lift to T^{n} at u = ({})\n", fiber.u);
            for (i, e) in l.bulk.entries.iter().enumerate() {
                if !e.is_zero() {
                    let _ = writeln!(text, "  b_{i} = {}", brief(&e.plus));
                }
            }
            for s in &l.steps {
                let _ = writeln!(text, "  step at order {}: {} correction(s)", s.order, s.corrections.len());
            }
            let gens: Vec<String> = l.monoid_gens.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                text,
                "certificate: residual valuation {} (target {n}), certified {}, monoid generators [{}]",
                l.residual_valuation,
                l.certified(),
                gens.join(", ")
            );
            Ok(ctx.emit("lift-bulk", text, bulk_lift_json(&l), l.certified()))
        }
        LiftCmd::Point { fiber, solution, order, bulk } => {
            let (p, u) = load_fiber(fiber)?;
            let n: ExponentQ = order.parse()?;
            let mode = ctx.mode();
            let b = load_bulk(bulk.as_deref(), &p, mode)?;
            let y0: Vec<NovikovSeries> =
                scalars(solution)?.into_iter().map(|s| Ok(NovikovSeries::constant(mode, mode.coerce(s)?))).collect::<R<_>>()?;
            let l = match ctx.cli.trunc {
                Some(_) => {
                    let f = build_potential(&p, &u, &b, mode, ctx.trunc()?)?;
                    toricpo_core::lifting::lift_point(&f, &y0, n)?
                }
                None => lift_point_adaptive(|t| build_potential(&p, &u, &b, mode, t).map_err(to_core), &y0, n)?,
            };
            let mut text = format!("critical point mod T^{n} after {} Newton step(s)\n", l.iterations);
            for (k, y) in l.y.iter().enumerate() {
                let _ = writeln!(text, "  y{} = {}", k + 1, brief(y));
            }
            let _ = writeln!(
                text,
                "certificate: gradient valuation {} (target {n}), certified {}, Hessian valuation {}",
                l.residual_valuation,
                l.certified(),
                l.hessian_valuation
            );
            Ok(ctx.emit("lift-point", text, point_lift_json(&l), l.certified()))
        }
    }
}

fn to_core(e: Box<dyn StdError>) -> Error {
    match e.downcast::<Error>() {
        Ok(e) => *e,
        Err(e) => Error::Parse(e.to_string()),
    }
}
