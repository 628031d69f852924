use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use super::{parse_scalar, ExponentQ, Mode, NovikovSeries, Order, Scalar, DEFAULT_TOL};
use crate::error::{Error, Result};

fn bigrational_string(q: &BigRational) -> String {
    if *q.denom() == BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse_bigrational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q == BigInt::from(0) {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl NovikovSeries {
    /// JSON form: `{"mode", "terms": [{"exp", "num"} | {"exp", "re", "im"}], "trunc"}`.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|(e, c)| match c {
                Scalar::Exact(q) => json!({"exp": e.to_string(), "num": bigrational_string(q)}),
                Scalar::Float(z) => json!({"exp": e.to_string(), "re": z.re, "im": z.im}),
            })
            .collect();
        let mut obj = json!({"terms": terms, "trunc": self.trunc().to_string()});
        match self.mode() {
            Mode::Exact => obj["mode"] = json!("exact"),
            Mode::Float { tol } => {
                obj["mode"] = json!("float");
                obj["tol"] = json!(tol);
            }
        }
        obj
    }

    /// Inverse of [`to_json`](Self::to_json). Also accepts a bare term list,
    /// read as exact data with the mode inferred from the records.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("series json: {m}"));
        let (list, trunc, mode_hint) = match v {
            Value::Array(a) => (a.as_slice(), Order::Infinite, None),
            Value::Object(o) => {
                let list = o.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
                let trunc = match o.get("trunc") {
                    Some(Value::String(s)) => s.parse()?,
                    None => Order::Infinite,
                    _ => return Err(bad("trunc must be a string")),
                };
                let tol = o.get("tol").and_then(Value::as_f64).unwrap_or(DEFAULT_TOL);
                let mode = match o.get("mode").and_then(Value::as_str) {
                    Some("exact") => Some(Mode::Exact),
                    Some("float") => Some(Mode::Float { tol }),
                    None => None,
                    Some(m) => return Err(bad(&format!("unknown mode {m}"))),
                };
                (list.as_slice(), trunc, mode)
            }
            _ => return Err(bad("expected object or array")),
        };
        let mut terms = Vec::with_capacity(list.len());
        let mut any_float = false;
        for rec in list {
            let e: ExponentQ = match rec.get("exp") {
                Some(Value::String(s)) => s.parse()?,
                Some(Value::Number(n)) => n.to_string().parse()?,
                _ => return Err(bad("term without exp")),
            };
            let c = if let Some(num) = rec.get("num") {
                let s = num.as_str().map(str::to_string).unwrap_or_else(|| num.to_string());
                Scalar::Exact(parse_bigrational(&s).ok_or_else(|| bad("bad num"))?)
            } else if let Some(re) = rec.get("re") {
                any_float = true;
                let re = re.as_f64().ok_or_else(|| bad("bad re"))?;
                let im = rec.get("im").and_then(Value::as_f64).unwrap_or(0.0);
                Scalar::complex(re, im)
            } else if let Some(Value::String(s)) = rec.get("coeff") {
                parse_scalar(s)?
            } else {
                return Err(bad("term without coefficient"));
            };
            terms.push((e, c));
        }
        let mode = mode_hint.unwrap_or(if any_float { Mode::float() } else { Mode::Exact });
        NovikovSeries::from_terms(mode, terms, trunc)
    }
}

impl Serialize for NovikovSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NovikovSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        NovikovSeries::from_json(&v).map_err(D::Error::custom)
    }
}

/// Parse a series literal such as `1 + 2*T^1/3 - 1/2*T^(2) mod T^3`.
///
/// Terms are separated by `+`/`-` at top level; each term is `c`, `T^e`,
/// `c*T^e` or `cT^e`, where `c` is any scalar literal (parenthesized when
/// complex) and `e` a rational. The optional `mod T^N` suffix sets the
/// truncation. Exact if every coefficient is rational.
pub fn parse_series(s: &str, mode: Option<Mode>) -> Result<NovikovSeries> {
    let bad = |m: String| Error::Parse(format!("series literal `{s}`: {m}"));
    let (body, trunc) = match s.split_once("mod") {
        Some((b, t)) => {
            let t = t.trim();
            let t = t.strip_prefix("T^").ok_or_else(|| bad("expected mod T^N".into()))?;
            (b, t.trim_matches(|c| c == '(' || c == ')' || c == '{' || c == '}').parse::<Order>()?)
        }
        None => (s, Order::Infinite),
    };
    let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
    if body.is_empty() || body == "0" {
        return Ok(NovikovSeries::zero_mod(mode.unwrap_or(Mode::Exact), trunc));
    }
    // Split at top-level signs that start a new term.
    let chars: Vec<char> = body.chars().collect();
    let mut pieces = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for k in 0..chars.len() {
        match chars[k] {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            '+' | '-' if depth == 0 && k > start => {
                let prev = chars[k - 1];
                if prev != '^' && prev != '*' && prev != 'e' && prev != '/' {
                    pieces.push(chars[start..k].iter().collect::<String>());
                    start = k;
                }
            }
            _ => {}
        }
    }
    pieces.push(chars[start..].iter().collect::<String>());
    let mut terms = Vec::new();
    for p in pieces {
        let (sign, p) = match p.strip_prefix('-') {
            Some(r) => (-1i64, r.to_string()),
            None => (1, p.trim_start_matches('+').to_string()),
        };
        let (coeff_str, exp) = match p.find('T') {
            Some(ix) => {
                let c = p[..ix].trim_end_matches('*');
                let rest = &p[ix + 1..];
                let e = match rest.strip_prefix('^') {
                    Some(e) => e.trim_matches(|c| c == '(' || c == ')' || c == '{' || c == '}').parse::<ExponentQ>()?,
                    None if rest.is_empty() => ExponentQ::ONE,
                    None => return Err(bad(format!("bad term `{p}`"))),
                };
                (c.to_string(), e)
            }
            None => (p.clone(), ExponentQ::ZERO),
        };
        let c = if coeff_str.is_empty() {
            Scalar::from_ratio(1, 1)
        } else {
            parse_scalar(coeff_str.trim_matches(|c| c == '(' || c == ')'))?
        };
        let c = if sign < 0 { -&c } else { c };
        terms.push((exp, c));
    }
    let any_float = terms.iter().any(|(_, c)| !c.is_exact());
    let mode = mode.unwrap_or(if any_float { Mode::float() } else { Mode::Exact });
    NovikovSeries::from_terms(mode, terms, trunc)
}
