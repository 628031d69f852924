//! Versioned JSON reports and input formats.
//!
//! Reports are wrapped as `{"schema": 1, "kind": ..., "result": ...}`. Object
//! keys are emitted sorted, so re-serializing a parsed report reproduces it
//! byte for byte.

use serde_json::{json, Value};

use crate::classify::{Bounds, FiberReport, FiberStatus};
use crate::error::{Error, Result};
use crate::leading::{LeadingSystem, LevelStructure};
use crate::lifting::{BulkLift, CaseReport, PointLift};
use crate::novikov::{parse_scalar, parse_series, Mode, NovikovSeries, Scalar};
use crate::potential::{BulkDeformation, BulkEntry, PotentialFunction};
use crate::repro::ReproReport;
use crate::solver::{LeadingSolution, Multiplicity, SolveOutcome};
use crate::toric::MomentPolytope;

pub const SCHEMA: u64 = 1;

pub fn envelope(kind: &str, result: Value) -> Value {
    json!({"schema": SCHEMA, "kind": kind, "result": result})
}

/// Pretty-printed JSON with sorted keys.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("a Value always serializes")
}

/// Parse a report and check its schema version.
pub fn parse_report(s: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    match v.get("schema").and_then(Value::as_u64) {
        Some(SCHEMA) => Ok(v),
        Some(k) => Err(Error::Parse(format!("unsupported schema {k}"))),
        None => Err(Error::Parse("report without schema".into())),
    }
}

pub fn scalar_json(s: &Scalar) -> Value {
    match s {
        Scalar::Exact(_) => json!({"num": s.to_string()}),
        Scalar::Float(z) => json!({"re": z.re, "im": z.im}),
    }
}

fn multiplicity_json(m: Multiplicity) -> Value {
    match m {
        Multiplicity::Known(k) => json!(k),
        Multiplicity::Unknown => Value::Null,
    }
}

pub fn polytope_json(p: &MomentPolytope) -> Value {
    serde_json::to_value(p).expect("polytope serializes")
}

pub fn polytope_from_json(v: &Value) -> Result<MomentPolytope> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("polytope json: {e}")))
}

pub fn potential_json(f: &PotentialFunction) -> Value {
    let terms: Vec<Value> = f.terms().map(|(v, c)| json!({"v": v, "coeff": c.to_json(), "text": c.to_string()})).collect();
    json!({"n": f.n, "mode": mode_name(f.mode), "trunc": f.trunc().to_string(), "terms": terms})
}

fn mode_name(m: Mode) -> &'static str {
    if m.is_exact() {
        "exact"
    } else {
        "float"
    }
}

pub fn levels_json(ls: &LevelStructure) -> Value {
    serde_json::to_value(ls).expect("levels serialize")
}

pub fn system_json(sys: &LeadingSystem) -> Value {
    let names = sys.var_names();
    let eqs: Vec<Value> = sys
        .equations
        .iter()
        .map(|e| {
            let terms: Vec<Value> = e.poly.terms().map(|(x, c)| json!({"e": x, "c": scalar_json(c)})).collect();
            json!({"level": e.level, "s": e.s, "text": e.poly.display_with(&names), "terms": terms})
        })
        .collect();
    json!({
        "vars": names,
        "cutoff": sys.cutoff,
        "generalized": sys.generalized,
        "flag_property": sys.has_flag_property(),
        "equations": eqs,
    })
}

pub fn solution_json(s: &LeadingSolution) -> Value {
    let values: Vec<Value> = s.scalars().iter().map(scalar_json).collect();
    json!({
        "values": values,
        "free": s.free,
        "multiplicity": multiplicity_json(s.multiplicity),
        "residual": s.residual,
    })
}

pub fn outcome_json(o: &SolveOutcome) -> Value {
    json!({
        "solutions": o.solutions.iter().map(solution_json).collect::<Vec<_>>(),
        "certified": o.certified,
        "path": o.path,
        "notes": o.notes,
    })
}

fn status_json(s: &FiberStatus) -> Value {
    match s {
        FiberStatus::BulkBalanced => json!({"label": s.label()}),
        FiberStatus::PartialUpTo { l0, certified } => json!({"label": s.label(), "l0": l0, "certified": certified}),
        FiberStatus::NoSolutionFound { certified } => json!({"label": s.label(), "certified": certified}),
        FiberStatus::NoFullFlag => json!({"label": s.label()}),
    }
}

pub fn bounds_json(b: &Bounds) -> Value {
    json!({
        "status": status_json(&b.status),
        "intersection_bound": b.intersection_bound,
        "threshold_area": b.threshold.to_string(),
        "threshold_physical": b.threshold_physical,
        "displacement_energy_area": b.threshold.to_string(),
        "displacement_energy_physical": b.displacement_energy_physical,
    })
}

pub fn fiber_json(r: &FiberReport) -> Value {
    let lift = r.lift.as_ref().map(|l| {
        json!({
            "target": l.target,
            "residual_valuation": l.residual_valuation.to_string(),
            "certified": l.certified,
            "steps": l.steps,
            "error": l.error,
        })
    });
    json!({
        "u": r.u,
        "status": status_json(&r.status),
        "threshold": r.threshold_bound.to_string(),
        "levels": r.levels,
        "vars": r.var_names,
        "witnesses": r.witnesses.iter().map(solution_json).collect::<Vec<_>>(),
        "path": r.path,
        "lift": lift,
        "notes": r.notes,
        "bounds": bounds_json(&crate::classify::report_bounds(r)),
    })
}

fn series_list(v: &[NovikovSeries]) -> Vec<Value> {
    v.iter().map(NovikovSeries::to_json).collect()
}

pub fn bulk_json(b: &BulkDeformation) -> Value {
    let entries: Vec<Value> = b
        .entries
        .iter()
        .map(|e| json!({"exp_b0": scalar_json(&e.unit), "b_plus": e.plus.to_json(), "text": e.plus.to_string()}))
        .collect();
    json!(entries)
}

pub fn bulk_lift_json(l: &BulkLift) -> Value {
    let steps: Vec<Value> = l
        .steps
        .iter()
        .map(|s| {
            let corr: Vec<Value> =
                s.corrections.iter().map(|(i, e, c)| json!({"facet": i, "exp": e, "c": scalar_json(c)})).collect();
            json!({"order": s.order, "corrections": corr})
        })
        .collect();
    json!({
        "bulk": bulk_json(&l.bulk),
        "point": l.point.iter().map(scalar_json).collect::<Vec<_>>(),
        "steps": steps,
        "certificate": {
            "target": l.target,
            "residual_valuation": l.residual_valuation.to_string(),
            "certified": l.certified(),
            "monoid_used": l.monoid_gens,
            "monoid_grown": l.monoid_grown,
        },
    })
}

pub fn point_lift_json(l: &PointLift) -> Value {
    json!({
        "y": series_list(&l.y),
        "y_text": l.y.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "iterations": l.iterations,
        "certificate": {
            "target": l.target,
            "residual_valuation": l.residual_valuation.to_string(),
            "certified": l.certified(),
            "hessian_valuation": l.hessian_valuation.to_string(),
        },
    })
}

pub fn case_report_json(r: &CaseReport) -> Value {
    let fibers: Vec<Value> = r
        .fibers
        .iter()
        .map(|f| {
            let lifts: Vec<Value> = f
                .lifts
                .iter()
                .map(|l| match l {
                    Ok(l) => point_lift_json(l),
                    Err(e) => json!({"error": e.to_string()}),
                })
                .collect();
            json!({
                "case": f.case,
                "u": f.u,
                "mu": f.mu,
                "secondary": outcome_json(&f.secondary),
                "solutions": f.solution_count(),
                "expected": f.expected,
                "multiple_root": f.multiple_root,
                "certified_lifts": f.certified_lifts(),
                "lifts": lifts,
            })
        })
        .collect();
    json!({
        "alpha": r.alpha,
        "beta": r.beta,
        "kappa": r.kappa,
        "kappa_star": r.kappa_star,
        "w": scalar_json(&r.w),
        "fibers": fibers,
    })
}

pub fn repro_json(r: &ReproReport) -> Value {
    let mut v = serde_json::to_value(r).expect("repro report serializes");
    v["passed"] = json!(r.passed());
    v
}

fn scalar_from(v: &Value) -> Result<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s),
        Value::Number(n) => parse_scalar(&n.to_string()),
        Value::Object(o) => {
            if let Some(num) = o.get("num") {
                let s = num.as_str().map(str::to_string).unwrap_or_else(|| num.to_string());
                parse_scalar(&s)
            } else {
                let re = o.get("re").and_then(Value::as_f64).ok_or_else(|| Error::Parse("scalar needs num or re".into()))?;
                let im = o.get("im").and_then(Value::as_f64).unwrap_or(0.0);
                Ok(Scalar::complex(re, im))
            }
        }
        _ => Err(Error::Parse(format!("not a scalar: {v}"))),
    }
}

fn series_from(v: &Value, mode: Mode) -> Result<NovikovSeries> {
    let s = match v {
        Value::String(s) => parse_series(s, Some(mode))?,
        _ => NovikovSeries::from_json(v)?,
    };
    if s.mode().same_kind(&mode) {
        Ok(s)
    } else {
        Ok(s.to_float(mode.tol()))
    }
}

fn entry_from(v: &Value, mode: Mode) -> Result<BulkEntry> {
    if let Value::Object(o) = v {
        if o.contains_key("exp_b0") || o.contains_key("b_plus") {
            let unit = match o.get("exp_b0") {
                Some(u) => mode.coerce(scalar_from(u)?)?,
                None => mode.one(),
            };
            let plus = match o.get("b_plus") {
                Some(p) => series_from(p, mode)?,
                None => NovikovSeries::zero(mode),
            };
            if !plus.in_lambda_plus() {
                return Err(Error::OutOfScope("b_plus must lie in Λ₊".into()));
            }
            return Ok(BulkEntry { unit, plus });
        }
    }
    let plus = series_from(v, mode)?;
    if !plus.in_lambda_plus() {
        return Err(Error::OutOfScope("a bare bulk series must lie in Λ₊; use {\"exp_b0\", \"b_plus\"}".into()));
    }
    Ok(BulkEntry { unit: mode.one(), plus })
}

/// Read a bulk deformation on `m` facets: either a list with one entry per
/// facet, or an object keyed by 0-based facet index. An entry is a `Λ₊`
/// series (literal or JSON) or the split form `{"exp_b0": unit, "b_plus": series}`.
pub fn bulk_from_json(v: &Value, m: usize, mode: Mode) -> Result<BulkDeformation> {
    let mut b = BulkDeformation::zero(m, mode);
    match v {
        Value::Array(a) => {
            if a.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: a.len() });
            }
            for (i, e) in a.iter().enumerate() {
                b.entries[i] = entry_from(e, mode)?;
            }
        }
        Value::Object(o) => {
            for (k, e) in o {
                let i: usize = k.trim().parse().map_err(|_| Error::Parse(format!("bulk key `{k}` is not a facet index")))?;
                if i >= m {
                    return Err(Error::DimensionMismatch { expected: m, got: i + 1 });
                }
                b.entries[i] = entry_from(e, mode)?;
            }
        }
        _ => return Err(Error::Parse("bulk must be a list or an object".into())),
    }
    Ok(b)
}
