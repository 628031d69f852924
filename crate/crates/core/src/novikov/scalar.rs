use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::ExponentQ;
use crate::error::{Error, Result};

/// Default modulus below which float coefficients are pruned to zero.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Coefficient field of a computation: exact rationals or complex floats.
///
/// A computation runs in one mode throughout; values are never promoted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

impl Mode {
    pub fn float() -> Self {
        Mode::Float { tol: DEFAULT_TOL }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Mode::Exact)
    }

    pub fn same_kind(&self, other: &Mode) -> bool {
        matches!(
            (self, other),
            (Mode::Exact, Mode::Exact) | (Mode::Float { .. }, Mode::Float { .. })
        )
    }

    pub fn tol(&self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Float { tol } => *tol,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float { .. } => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, k: i64) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(BigRational::from_integer(BigInt::from(k))),
            Mode::Float { .. } => Scalar::Float(Complex64::new(k as f64, 0.0)),
        }
    }

    pub fn rational(&self, q: ExponentQ) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(BigRational::new(q.numer().into(), q.denom().into())),
            Mode::Float { .. } => Scalar::Float(Complex64::new(q.to_f64(), 0.0)),
        }
    }

    /// Whether `s` counts as zero in this mode.
    pub fn negligible(&self, s: &Scalar) -> bool {
        match (self, s) {
            (_, Scalar::Exact(q)) => q.is_zero(),
            (Mode::Float { tol }, Scalar::Float(z)) => z.norm() < *tol,
            (Mode::Exact, Scalar::Float(z)) => *z == Complex64::new(0.0, 0.0),
        }
    }

    /// Coerce a scalar into this mode. Exact to float is allowed (it is how
    /// float inputs are written down); float to exact is a mode mismatch.
    pub fn coerce(&self, s: Scalar) -> Result<Scalar> {
        match (self, s) {
            (Mode::Exact, s @ Scalar::Exact(_)) => Ok(s),
            (Mode::Exact, Scalar::Float(_)) => Err(Error::ModeMismatch),
            (Mode::Float { .. }, s) => Ok(Scalar::Float(s.to_complex())),
        }
    }
}

/// A single coefficient.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn from_ratio(numer: i64, denom: i64) -> Scalar {
        Scalar::Exact(BigRational::new(numer.into(), denom.into()))
    }

    pub fn complex(re: f64, im: f64) -> Scalar {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(q) => Complex64::new(rational_to_f64(q), 0.0),
            Scalar::Float(z) => *z,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q).abs(),
            Scalar::Float(z) => z.norm(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_exact_zero() {
            return None;
        }
        Some(match self {
            Scalar::Exact(q) => Scalar::Exact(q.recip()),
            Scalar::Float(z) => Scalar::Float(z.inv()),
        })
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q.clone()),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q * BigRational::from_integer(k.into())),
            Scalar::Float(z) => Scalar::Float(z * k as f64),
        }
    }

    pub fn mul_q(&self, e: ExponentQ) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Exact(q * BigRational::new(e.numer().into(), e.denom().into())),
            Scalar::Float(z) => Scalar::Float(z * e.to_f64()),
        }
    }

    pub fn div_q(&self, e: ExponentQ) -> Scalar {
        assert!(!e.is_zero());
        match self {
            Scalar::Exact(q) => Scalar::Exact(q * BigRational::new(e.denom().into(), e.numer().into())),
            Scalar::Float(z) => Scalar::Float(z / e.to_f64()),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_one(),
            Scalar::Float(z) => *z == Complex64::new(1.0, 0.0),
        }
    }

    fn kinds_match(&self, other: &Scalar) -> bool {
        self.is_exact() == other.is_exact()
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge operands: scale down by bit length before dividing.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(900) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        assert!(self.kinds_match(rhs), "mixed scalar modes");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        assert!(self.kinds_match(rhs), "mixed scalar modes");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a - b),
            _ => unreachable!(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        assert!(self.kinds_match(rhs), "mixed scalar modes");
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a * b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.re == 0.0 {
                    write!(f, "{}i", z.im)
                } else if z.im.is_sign_negative() {
                    write!(f, "({}-{}i)", z.re, -z.im)
                } else {
                    write!(f, "({}+{}i)", z.re, z.im)
                }
            }
        }
    }
}

/// Parse `p/q`, `p`, a decimal, or a complex literal such as `1.5-2i`, `3i`.
/// Rationals parse to exact scalars, anything with a decimal point or `i`
/// to float scalars.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim().replace(' ', "");
    let bad = || Error::Parse(format!("not a scalar: `{s}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if !t.contains('i') {
        if t.contains('.') || t.contains('e') {
            let x: f64 = t.parse().map_err(|_| bad())?;
            return Ok(Scalar::complex(x, 0.0));
        }
        let q: ExponentQ = t.parse().map_err(|_| bad())?;
        return Ok(Scalar::from_ratio(q.numer(), q.denom()));
    }
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    // split at the last sign that is not at position 0 and not after an exponent marker
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E' {
            split = Some(k);
            break;
        }
    }
    let parse_part = |p: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => {
                if p.contains('/') {
                    Ok(p.parse::<ExponentQ>()?.to_f64())
                } else {
                    p.parse::<f64>().map_err(|_| bad())
                }
            }
        }
    };
    let (re, im) = match split {
        Some(k) => (parse_part(&body[..k])?, parse_part(&body[k..])?),
        None => (0.0, parse_part(body)?),
    };
    Ok(Scalar::complex(re, im))
}
