use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// An exact rational exponent of the formal parameter `T`.
///
/// Exponents are areas divided by `2π`. Arithmetic is checked: an overflow of
/// the underlying 64-bit numerator or denominator panics instead of wrapping.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExponentQ(Rational64);

impl ExponentQ {
    pub const ZERO: ExponentQ = ExponentQ(Rational64::new_raw(0, 1));
    pub const ONE: ExponentQ = ExponentQ(Rational64::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator in exponent");
        ExponentQ(Rational64::new(numer, denom))
    }

    pub fn integer(n: i64) -> Self {
        ExponentQ(Rational64::from_integer(n))
    }

    pub fn from_ratio(r: Rational64) -> Self {
        ExponentQ(r)
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn numer(self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(self) -> bool {
        self.0.is_negative()
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mul_int(self, k: i64) -> Self {
        ExponentQ(
            self.0
                .checked_mul(&Rational64::from_integer(k))
                .expect("exponent arithmetic overflow"),
        )
    }

    pub fn mul_q(self, other: ExponentQ) -> Self {
        ExponentQ(self.0.checked_mul(&other.0).expect("exponent arithmetic overflow"))
    }

    pub fn div_int(self, k: i64) -> Self {
        assert!(k != 0, "division of exponent by zero");
        ExponentQ(self.0 / Rational64::from_integer(k))
    }

    /// Integer key of this exponent on the grid `(1/denom) Z`, if it lies on it.
    pub(crate) fn grid_key(self, denom: i64) -> i64 {
        let (q, r) = denom.div_rem(&self.denom());
        debug_assert_eq!(r, 0, "exponent not on the requested grid");
        self.numer().checked_mul(q).expect("exponent grid overflow")
    }

    pub(crate) fn from_grid_key(key: i64, denom: i64) -> Self {
        ExponentQ::new(key, denom)
    }
}

impl fmt::Debug for ExponentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExponentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl Add for ExponentQ {
    type Output = ExponentQ;
    fn add(self, rhs: ExponentQ) -> ExponentQ {
        ExponentQ(self.0.checked_add(&rhs.0).expect("exponent arithmetic overflow"))
    }
}

impl AddAssign for ExponentQ {
    fn add_assign(&mut self, rhs: ExponentQ) {
        *self = *self + rhs;
    }
}

impl Sub for ExponentQ {
    type Output = ExponentQ;
    fn sub(self, rhs: ExponentQ) -> ExponentQ {
        ExponentQ(self.0.checked_sub(&rhs.0).expect("exponent arithmetic overflow"))
    }
}

impl Neg for ExponentQ {
    type Output = ExponentQ;
    fn neg(self) -> ExponentQ {
        ExponentQ(-self.0)
    }
}

impl Mul<i64> for ExponentQ {
    type Output = ExponentQ;
    fn mul(self, rhs: i64) -> ExponentQ {
        self.mul_int(rhs)
    }
}

impl Sum for ExponentQ {
    fn sum<I: Iterator<Item = ExponentQ>>(iter: I) -> Self {
        iter.fold(ExponentQ::ZERO, |a, b| a + b)
    }
}

impl From<i64> for ExponentQ {
    fn from(n: i64) -> Self {
        ExponentQ::integer(n)
    }
}

impl FromStr for ExponentQ {
    type Err = Error;

    /// Accepts `p`, `p/q`, and terminating decimals such as `0.35`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: `{s}`"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(ExponentQ::new(p, q));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
                return Err(bad());
            }
            let i: i64 = if int_digits.is_empty() {
                0
            } else {
                int_digits.parse().map_err(|_| bad())?
            };
            let f: i64 = frac.parse().map_err(|_| bad())?;
            let den = 10i64.pow(frac.len() as u32);
            let num = i.checked_mul(den).and_then(|x| x.checked_add(f)).ok_or_else(bad)?;
            return Ok(ExponentQ::new(if neg { -num } else { num }, den));
        }
        s.parse::<i64>().map(ExponentQ::integer).map_err(|_| bad())
    }
}

impl Serialize for ExponentQ {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExponentQ {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A valuation or truncation order: a rational exponent or `+∞`.
///
/// `Infinite` sorts above every finite value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Order {
    Finite(ExponentQ),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<ExponentQ> {
        match self {
            Order::Finite(e) => Some(e),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }

    pub fn shift(self, e: ExponentQ) -> Order {
        match self {
            Order::Finite(x) => Order::Finite(x + e),
            Order::Infinite => Order::Infinite,
        }
    }
}

impl From<ExponentQ> for Order {
    fn from(e: ExponentQ) -> Self {
        Order::Finite(e)
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(e) => write!(f, "{e}"),
            Order::Infinite => write!(f, "+inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Order::Infinite),
            other => other.parse().map(Order::Finite),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(e) => e.serialize(serializer),
            Order::Infinite => serializer.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of the denominators; panics on overflow.
pub(crate) fn common_denominator<I: IntoIterator<Item = ExponentQ>>(it: I) -> i64 {
    it.into_iter().fold(1i64, |acc, e| {
        let d = e.denom();
        let g = acc.gcd(&d);
        (acc / g).checked_mul(d).expect("exponent denominator overflow")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("1/3".parse::<ExponentQ>().unwrap(), ExponentQ::new(1, 3));
        assert_eq!("0.35".parse::<ExponentQ>().unwrap(), ExponentQ::new(7, 20));
        assert_eq!("-0.5".parse::<ExponentQ>().unwrap(), ExponentQ::new(-1, 2));
        assert_eq!("-2".parse::<ExponentQ>().unwrap(), ExponentQ::integer(-2));
        assert!("1/0".parse::<ExponentQ>().is_err());
        assert!("abc".parse::<ExponentQ>().is_err());
    }

    #[test]
    fn order_sorts_infinity_last() {
        let a = Order::Finite(ExponentQ::integer(100));
        assert!(a < Order::Infinite);
        assert_eq!(a + Order::Infinite, Order::Infinite);
        assert_eq!(a.to_string(), "100");
        assert_eq!("+inf".parse::<Order>().unwrap(), Order::Infinite);
    }

    #[test]
    fn display_reduces() {
        assert_eq!(ExponentQ::new(6, 4).to_string(), "3/2");
        assert_eq!(ExponentQ::new(4, 2).to_string(), "2");
    }
}
