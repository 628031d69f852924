use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use super::exponent::common_denominator;
use super::{ExponentQ, Mode, Order, Scalar};
use crate::error::{Error, Result};

/// Upper bound on the number of exponents a recurrence (exp, inverse) may
/// generate below the truncation.
pub const TERM_CAP: usize = 400_000;

/// Float coefficients up to this multiple of the mode tolerance count as
/// rounding noise when certifying a valuation.
pub const NOISE_FACTOR: f64 = 1e3;

/// A truncated Novikov series `Σ a_i T^{λ_i}` known modulo `T^trunc`.
///
/// Terms are kept sorted by strictly increasing exponent with no zero
/// coefficients and every exponent below `trunc`. `trunc = Infinite` marks
/// exact data such as the coefficients of a Laurent polynomial.
#[derive(Clone, Debug)]
pub struct NovikovSeries {
    mode: Mode,
    terms: Vec<(ExponentQ, Scalar)>,
    trunc: Order,
}

impl PartialEq for NovikovSeries {
    fn eq(&self, other: &Self) -> bool {
        self.mode.same_kind(&other.mode) && self.trunc == other.trunc && self.terms == other.terms
    }
}

impl NovikovSeries {
    /// Build a series from arbitrary terms: merges repeated exponents, drops
    /// zero coefficients and anything at or above `trunc`. Exact scalars are
    /// coerced into float mode; float scalars in exact mode are rejected.
    pub fn from_terms<I>(mode: Mode, terms: I, trunc: Order) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentQ, Scalar)>,
    {
        let mut v = Vec::new();
        for (e, c) in terms {
            if Order::Finite(e) < trunc {
                v.push((e, mode.coerce(c)?));
            }
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(ExponentQ, Scalar)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc = &*lc + &c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !mode.negligible(c));
        Ok(NovikovSeries { mode, terms: out, trunc })
    }

    /// Panicking variant of [`from_terms`](Self::from_terms) for literals.
    pub fn new<I>(mode: Mode, terms: I, trunc: Order) -> Self
    where
        I: IntoIterator<Item = (ExponentQ, Scalar)>,
    {
        Self::from_terms(mode, terms, trunc).expect("scalar mode mismatch in series literal")
    }

    pub fn zero(mode: Mode) -> Self {
        NovikovSeries { mode, terms: Vec::new(), trunc: Order::Infinite }
    }

    pub fn zero_mod(mode: Mode, trunc: Order) -> Self {
        NovikovSeries { mode, terms: Vec::new(), trunc }
    }

    pub fn one(mode: Mode) -> Self {
        Self::constant(mode, mode.one())
    }

    pub fn constant(mode: Mode, c: Scalar) -> Self {
        Self::monomial(mode, c, ExponentQ::ZERO)
    }

    /// `c T^e`, exact data.
    pub fn monomial(mode: Mode, c: Scalar, e: ExponentQ) -> Self {
        Self::new(mode, [(e, c)], Order::Infinite)
    }

    /// `T^e`, exact data.
    pub fn t_pow(mode: Mode, e: ExponentQ) -> Self {
        Self::monomial(mode, mode.one(), e)
    }

    pub(crate) fn from_sorted_unchecked(mode: Mode, terms: Vec<(ExponentQ, Scalar)>, trunc: Order) -> Self {
        let s = NovikovSeries { mode, terms, trunc };
        debug_assert!(s.is_normalized());
        s
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[(ExponentQ, Scalar)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(ExponentQ, Scalar)> {
        self.terms
    }

    pub fn trunc(&self) -> Order {
        self.trunc
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No stored terms. With a finite truncation this means "zero modulo
    /// `T^trunc`", not necessarily zero.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_data(&self) -> bool {
        self.trunc.is_infinite()
    }

    /// Sorted, strictly increasing, nonzero, below `trunc`.
    pub fn is_normalized(&self) -> bool {
        self.terms.windows(2).all(|w| w[0].0 < w[1].0)
            && self.terms.iter().all(|(e, c)| Order::Finite(*e) < self.trunc && !self.mode.negligible(c))
            && self.terms.iter().all(|(_, c)| c.is_exact() == self.mode.is_exact())
    }

    /// `𝔳_T`: the smallest stored exponent, `+∞` for no terms.
    pub fn valuation(&self) -> Order {
        self.terms.first().map_or(Order::Infinite, |(e, _)| Order::Finite(*e))
    }

    /// Certified lower bound for the valuation of the element this series
    /// approximates: `min(valuation, trunc)`.
    pub fn valuation_bound(&self) -> Order {
        self.valuation().min(self.trunc)
    }

    /// [`valuation_bound`](Self::valuation_bound) that treats float
    /// coefficients of norm at most `NOISE_FACTOR · tol` as rounding noise.
    pub fn noise_valuation_bound(&self) -> Order {
        match self.mode {
            Mode::Exact => self.valuation_bound(),
            Mode::Float { tol } => self
                .terms
                .iter()
                .find(|(_, c)| c.norm() > NOISE_FACTOR * tol)
                .map_or(Order::Infinite, |(e, _)| Order::Finite(*e))
                .min(self.trunc),
        }
    }

    pub fn leading(&self) -> Option<&(ExponentQ, Scalar)> {
        self.terms.first()
    }

    pub fn coeff(&self, e: ExponentQ) -> Scalar {
        match self.terms.binary_search_by(|(x, _)| x.cmp(&e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.mode.zero(),
        }
    }

    /// Constant term, i.e. the reduction modulo `Λ₊` for elements of `Λ₀`.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(ExponentQ::ZERO)
    }

    /// In `Λ₀`: no negative exponents.
    pub fn in_lambda0(&self) -> bool {
        self.terms.first().is_none_or(|(e, _)| !e.is_negative())
    }

    /// In `Λ₊`: all exponents positive.
    pub fn in_lambda_plus(&self) -> bool {
        self.terms.first().is_none_or(|(e, _)| e.is_positive())
    }

    /// In `Λ₀ \ Λ₊`.
    pub fn is_unit(&self) -> bool {
        self.in_lambda0() && matches!(self.terms.first(), Some((e, _)) if e.is_zero())
    }

    fn check_mode(&self, other: &Self) -> Result<()> {
        if self.mode.same_kind(&other.mode) {
            Ok(())
        } else {
            Err(Error::ModeMismatch)
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        self.check_mode(rhs)?;
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &rhs.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (e, c) = match ord {
                Ordering::Less => {
                    i += 1;
                    (a[i - 1].0, a[i - 1].1.clone())
                }
                Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0, b[j - 1].1.clone())
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0, &a[i - 1].1 + &b[j - 1].1)
                }
            };
            if Order::Finite(e) < trunc && !self.mode.negligible(&c) {
                out.push((e, c));
            }
        }
        Ok(Self::from_sorted_unchecked(self.mode, out, trunc))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&-rhs)
    }

    /// Cauchy product. The result is known modulo
    /// `T^{min(a.trunc + 𝔳(b), b.trunc + 𝔳(a))}` with `𝔳` the certified
    /// valuation bound.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_mode(rhs)?;
        let trunc = (self.trunc + rhs.valuation_bound()).min(rhs.trunc + self.valuation_bound());
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return Ok(Self::zero_mod(self.mode, trunc));
        }
        let terms = convolve(self.mode, &self.terms, &rhs.terms, trunc);
        Ok(Self::from_sorted_unchecked(self.mode, terms, trunc))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let c = self.mode.coerce(c.clone()).expect("scalar mode mismatch");
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (*e, a * &c))
            .filter(|(_, a)| !self.mode.negligible(a))
            .collect();
        Self::from_sorted_unchecked(self.mode, terms, self.trunc)
    }

    /// Multiply by `T^e`.
    pub fn shift(&self, e: ExponentQ) -> Self {
        let terms = self.terms.iter().map(|(x, a)| (*x + e, a.clone())).collect();
        Self::from_sorted_unchecked(self.mode, terms, self.trunc.shift(e))
    }

    /// Drop exponents `≥ n` and lower `trunc` to `min(trunc, n)`.
    pub fn truncate(&self, n: Order) -> Self {
        let trunc = self.trunc.min(n);
        let terms = self.terms.iter().take_while(|(e, _)| Order::Finite(*e) < trunc).cloned().collect();
        Self::from_sorted_unchecked(self.mode, terms, trunc)
    }

    /// Keep exponents below `n` and declare the series known modulo `T^n`,
    /// even where `n` exceeds the current truncation. Used when a truncated
    /// series is taken as exact data for a new computation.
    pub fn with_trunc(&self, n: Order) -> Self {
        let terms = self.terms.iter().take_while(|(e, _)| Order::Finite(*e) < n).cloned().collect();
        Self::from_sorted_unchecked(self.mode, terms, n)
    }

    /// Whether `self ≡ other (mod T^n)` as stored data. Float coefficients are
    /// compared with the mode tolerance.
    pub fn eq_mod(&self, other: &Self, n: Order) -> bool {
        if !self.mode.same_kind(&other.mode) {
            return false;
        }
        let a = self.with_trunc(Order::Infinite);
        let b = other.with_trunc(Order::Infinite);
        let d = a.checked_sub(&b).expect("mode checked");
        d.terms.iter().all(|(e, _)| Order::Finite(*e) >= n)
    }

    /// Coefficientwise comparison with absolute tolerance `tol` (exact
    /// equality in exact mode), ignoring truncation orders.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let mut map: HashMap<ExponentQ, Complex64> = HashMap::new();
        if self.mode.is_exact() && other.mode.is_exact() {
            return self.terms == other.terms;
        }
        for (e, c) in &self.terms {
            *map.entry(*e).or_default() += c.to_complex();
        }
        for (e, c) in &other.terms {
            *map.entry(*e).or_default() -= c.to_complex();
        }
        map.values().all(|z| z.norm() <= tol)
    }

    /// A copy in float mode with the given tolerance.
    pub fn to_float(&self, tol: f64) -> Self {
        let mode = Mode::Float { tol };
        Self::new(mode, self.terms.iter().map(|(e, c)| (*e, Scalar::Float(c.to_complex()))), self.trunc)
    }

    /// Split off the constant term: `(a₀, a - a₀)`.
    pub fn split_constant(&self) -> (Scalar, Self) {
        let a0 = self.constant_term();
        let rest = self
            .terms
            .iter()
            .filter(|(e, _)| !e.is_zero())
            .cloned()
            .collect();
        (a0, Self::from_sorted_unchecked(self.mode, rest, self.trunc))
    }

    /// `exp(a)` for `a ∈ Λ₀`. A nonzero constant term is exponentiated as a
    /// scalar, which requires float mode; in exact mode supply `exp(a₀)` and
    /// use [`exp_with_unit`](Self::exp_with_unit).
    pub fn exp(&self) -> Result<Self> {
        let (a0, plus) = self.split_constant();
        if a0.is_exact_zero() {
            return plus.exp_plus();
        }
        match a0 {
            Scalar::Exact(_) => Err(Error::NeedsTranscendental),
            Scalar::Float(z) => self.exp_with_unit(&Scalar::Float(z.exp())),
        }
    }

    /// `unit · exp(a - a₀)`, where the caller supplies `unit = exp(a₀)`.
    pub fn exp_with_unit(&self, unit: &Scalar) -> Result<Self> {
        let (_, plus) = self.split_constant();
        Ok(plus.exp_plus()?.scale(unit))
    }

    fn exp_plus(&self) -> Result<Self> {
        if let Some((e, _)) = self.terms.first() {
            if e.is_negative() {
                return Err(Error::NotInLambda0(*e));
            }
        }
        debug_assert!(self.in_lambda_plus());
        if self.terms.is_empty() {
            return Ok(Self::one(self.mode).truncate(self.trunc));
        }
        let trunc = self.trunc.finite().ok_or(Error::UnboundedTruncation)?;
        let d = common_denominator(self.terms.iter().map(|(e, _)| *e));
        let bound = ceil_key(trunc, d);
        let gens: Vec<(i64, Scalar)> = self.terms.iter().map(|(e, c)| (e.grid_key(d), c.clone())).collect();
        let keys = grid_monoid(&gens.iter().map(|g| g.0).collect::<Vec<_>>(), bound, TERM_CAP)?;
        // θE = (θa)E with θ = T d/dT: k E_k = Σ_f f a_f E_{k-f}.
        let mut vals: HashMap<i64, Scalar> = HashMap::with_capacity(keys.len());
        let mut out = Vec::with_capacity(keys.len());
        vals.insert(0, self.mode.one());
        out.push((ExponentQ::ZERO, self.mode.one()));
        let fa: Vec<(i64, Scalar)> = gens.iter().map(|(k, c)| (*k, c.mul_int(*k))).collect();
        for &k in keys.iter().skip(1) {
            let mut acc = self.mode.zero();
            for (f, c) in &fa {
                if *f > k {
                    break;
                }
                if let Some(prev) = vals.get(&(k - f)) {
                    acc = &acc + &(c * prev);
                }
            }
            let val = acc.div_q(ExponentQ::integer(k));
            if !self.mode.negligible(&val) {
                out.push((ExponentQ::from_grid_key(k, d), val.clone()));
                vals.insert(k, val);
            }
        }
        Ok(Self::from_sorted_unchecked(self.mode, out, self.trunc))
    }

    /// Inverse in the Novikov field. Writing `a = cT^v(1+u)` with `u ∈ Λ₊`
    /// known modulo `T^{N-v}`, the inverse is known modulo `T^{N-2v}`.
    pub fn invert(&self) -> Result<Self> {
        let (v, c) = self.terms.first().cloned().ok_or(Error::DivisionByZero)?;
        let cinv = c.inv().ok_or(Error::DivisionByZero)?;
        let out_trunc = self.trunc.shift(-v - v);
        let u: Vec<(ExponentQ, Scalar)> = self.terms[1..].iter().map(|(e, a)| (*e - v, a * &cinv)).collect();
        if u.is_empty() {
            return Ok(Self::from_sorted_unchecked(self.mode, vec![(-v, cinv)], out_trunc));
        }
        let ju_trunc = self.trunc.shift(-v).finite().ok_or(Error::UnboundedTruncation)?;
        let d = common_denominator(u.iter().map(|(e, _)| *e));
        let bound = ceil_key(ju_trunc, d);
        let gens: Vec<(i64, Scalar)> = u.iter().map(|(e, a)| (e.grid_key(d), a.clone())).collect();
        let keys = grid_monoid(&gens.iter().map(|g| g.0).collect::<Vec<_>>(), bound, TERM_CAP)?;
        // (1+u)J = 1: J_k = -Σ_f u_f J_{k-f}.
        let mut vals: HashMap<i64, Scalar> = HashMap::with_capacity(keys.len());
        vals.insert(0, self.mode.one());
        let mut out = Vec::with_capacity(keys.len());
        out.push((-v, cinv.clone()));
        for &k in keys.iter().skip(1) {
            let mut acc = self.mode.zero();
            for (f, a) in &gens {
                if *f > k {
                    break;
                }
                if let Some(prev) = vals.get(&(k - f)) {
                    acc = &acc - &(a * prev);
                }
            }
            if !self.mode.negligible(&acc) {
                out.push((ExponentQ::from_grid_key(k, d) - v, &acc * &cinv));
                vals.insert(k, acc);
            }
        }
        out.retain(|(_, c)| !self.mode.negligible(c));
        Ok(Self::from_sorted_unchecked(self.mode, out, out_trunc))
    }

    /// Integer power; negative powers go through [`invert`](Self::invert).
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut result = Self::one(self.mode);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Apply `f` to every coefficient, keeping exponents and truncation.
    pub fn map_coeffs<F: Fn(ExponentQ, &Scalar) -> Scalar>(&self, f: F) -> Self {
        Self::new(self.mode, self.terms.iter().map(|(e, c)| (*e, f(*e, c))), self.trunc)
    }

    /// Maximum coefficient modulus, used for float diagnostics.
    pub fn max_norm(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }
}

/// `ceil(t · d)` as a grid key: exponents `k/d < t` are exactly `k < key`.
pub(crate) fn ceil_key(t: ExponentQ, d: i64) -> i64 {
    let num = t.numer() as i128 * d as i128;
    let den = t.denom() as i128;
    let q = num.div_euclid(den) + if num.rem_euclid(den) == 0 { 0 } else { 1 };
    i64::try_from(q).expect("exponent grid overflow")
}

/// Elements of the monoid generated by positive integer `gens` strictly below
/// `bound`, ascending, including 0.
pub(crate) fn grid_monoid(gens: &[i64], bound: i64, cap: usize) -> Result<Vec<i64>> {
    let mut gens: Vec<i64> = gens.iter().copied().filter(|g| *g > 0).collect();
    gens.sort_unstable();
    gens.dedup();
    let mut out = Vec::new();
    let mut frontier = BTreeSet::new();
    if bound > 0 {
        frontier.insert(0i64);
    }
    while let Some(x) = frontier.pop_first() {
        out.push(x);
        if out.len() > cap {
            return Err(Error::MonoidOverflow(cap));
        }
        for g in &gens {
            let y = x + g;
            if y >= bound {
                break;
            }
            frontier.insert(y);
        }
    }
    Ok(out)
}

fn convolve(
    mode: Mode,
    a: &[(ExponentQ, Scalar)],
    b: &[(ExponentQ, Scalar)],
    trunc: Order,
) -> Vec<(ExponentQ, Scalar)> {
    let d = common_denominator(a.iter().chain(b.iter()).map(|(e, _)| *e));
    let ka: Vec<i64> = a.iter().map(|(e, _)| e.grid_key(d)).collect();
    let kb: Vec<i64> = b.iter().map(|(e, _)| e.grid_key(d)).collect();
    let lo = ka[0] + kb[0];
    let mut hi = ka[ka.len() - 1] + kb[kb.len() - 1] + 1;
    if let Order::Finite(t) = trunc {
        hi = hi.min(ceil_key(t, d));
    }
    if hi <= lo {
        return Vec::new();
    }
    let width = (hi - lo) as usize;
    match mode {
        Mode::Float { tol } => {
            let ca: Vec<Complex64> = a.iter().map(|(_, c)| c.to_complex()).collect();
            let cb: Vec<Complex64> = b.iter().map(|(_, c)| c.to_complex()).collect();
            let dense = width <= (1 << 16).max(8 * a.len() * b.len());
            if dense {
                let mut acc = vec![Complex64::new(0.0, 0.0); width];
                for (i, x) in ka.iter().enumerate() {
                    for (j, y) in kb.iter().enumerate() {
                        let k = x + y;
                        if k >= hi {
                            break;
                        }
                        acc[(k - lo) as usize] += ca[i] * cb[j];
                    }
                }
                acc.into_iter()
                    .enumerate()
                    .filter(|(_, z)| z.norm() >= tol)
                    .map(|(k, z)| (ExponentQ::from_grid_key(lo + k as i64, d), Scalar::Float(z)))
                    .collect()
            } else {
                let mut acc: HashMap<i64, Complex64> = HashMap::new();
                for (i, x) in ka.iter().enumerate() {
                    for (j, y) in kb.iter().enumerate() {
                        let k = x + y;
                        if k >= hi {
                            break;
                        }
                        *acc.entry(k).or_default() += ca[i] * cb[j];
                    }
                }
                let mut v: Vec<_> = acc.into_iter().filter(|(_, z)| z.norm() >= tol).collect();
                v.sort_unstable_by_key(|(k, _)| *k);
                v.into_iter().map(|(k, z)| (ExponentQ::from_grid_key(k, d), Scalar::Float(z))).collect()
            }
        }
        Mode::Exact => {
            let mut acc: HashMap<i64, BigRational> = HashMap::new();
            for (i, x) in ka.iter().enumerate() {
                let ai = a[i].1.as_rational().expect("exact mode");
                for (j, y) in kb.iter().enumerate() {
                    let k = x + y;
                    if k >= hi {
                        break;
                    }
                    let bj = b[j].1.as_rational().expect("exact mode");
                    let slot = acc.entry(k).or_insert_with(BigRational::zero);
                    *slot += ai * bj;
                }
            }
            let mut v: Vec<_> = acc.into_iter().filter(|(_, q)| !q.is_zero()).collect();
            v.sort_unstable_by_key(|(k, _)| *k);
            v.into_iter().map(|(k, q)| (ExponentQ::from_grid_key(k, d), Scalar::Exact(q))).collect()
        }
    }
}

impl Neg for &NovikovSeries {
    type Output = NovikovSeries;
    fn neg(self) -> NovikovSeries {
        let terms = self.terms.iter().map(|(e, c)| (*e, -c)).collect();
        NovikovSeries::from_sorted_unchecked(self.mode, terms, self.trunc)
    }
}

impl Add for &NovikovSeries {
    type Output = NovikovSeries;
    fn add(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.checked_add(rhs).expect("scalar mode mismatch")
    }
}

impl Sub for &NovikovSeries {
    type Output = NovikovSeries;
    fn sub(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.checked_sub(rhs).expect("scalar mode mismatch")
    }
}

impl Mul for &NovikovSeries {
    type Output = NovikovSeries;
    fn mul(self, rhs: &NovikovSeries) -> NovikovSeries {
        self.checked_mul(rhs).expect("scalar mode mismatch")
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "T^{e}")?;
            } else {
                write!(f, "{c}*T^{e}")?;
            }
        }
        if let Order::Finite(t) = self.trunc {
            write!(f, " mod T^{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExponentQ {
        ExponentQ::new(n, d)
    }

    fn ex(terms: &[(i64, i64, i64)], trunc: Order) -> NovikovSeries {
        NovikovSeries::new(
            Mode::Exact,
            terms.iter().map(|&(n, d, c)| (q(n, d), Scalar::from_ratio(c, 1))),
            trunc,
        )
    }

    fn fin(n: i64) -> Order {
        Order::Finite(ExponentQ::integer(n))
    }

    #[test]
    fn add_cancels_and_takes_min_trunc() {
        let a = ex(&[(0, 1, 1), (1, 1, 1)], Order::Infinite);
        let b = ex(&[(1, 1, -1)], Order::Infinite);
        assert_eq!(&a + &b, NovikovSeries::one(Mode::Exact));
        let x = ex(&[(0, 1, 1)], fin(3));
        let y = ex(&[(1, 1, 1)], fin(2));
        assert_eq!((&x + &y).trunc(), fin(2));
        let t = ex(&[(1, 3, 1)], Order::Infinite);
        assert_eq!(&t + &t, ex(&[(1, 3, 2)], Order::Infinite));
    }

    #[test]
    fn mul_truncates() {
        let a = ex(&[(0, 1, 1), (1, 1, 1)], fin(3));
        let b = ex(&[(0, 1, 1), (1, 1, -1)], fin(3));
        assert_eq!(&a * &b, ex(&[(0, 1, 1), (2, 1, -1)], fin(3)));
        let h = ex(&[(1, 2, 1)], Order::Infinite);
        assert_eq!(&h * &h, ex(&[(1, 1, 1)], Order::Infinite));
    }

    #[test]
    fn mul_truncation_uses_valuations() {
        // T·(x mod T^2) is known mod T^3.
        let t = ex(&[(1, 1, 1)], Order::Infinite);
        let x = ex(&[(0, 1, 1)], fin(2));
        assert_eq!((&t * &x).trunc(), fin(3));
    }

    #[test]
    fn valuations() {
        assert_eq!(ex(&[(1, 3, 2), (1, 1, 1)], Order::Infinite).valuation(), Order::Finite(q(1, 3)));
        assert_eq!(NovikovSeries::zero(Mode::Exact).valuation(), Order::Infinite);
    }

    #[test]
    fn exp_low_order() {
        let k = q(1, 7);
        let a = NovikovSeries::new(Mode::Exact, [(k, Scalar::from_ratio(3, 1))], Order::Finite(k * 3));
        let e = a.exp().unwrap();
        assert_eq!(
            e,
            NovikovSeries::new(
                Mode::Exact,
                [
                    (ExponentQ::ZERO, Scalar::from_ratio(1, 1)),
                    (k, Scalar::from_ratio(3, 1)),
                    (k * 2, Scalar::from_ratio(9, 2)),
                ],
                Order::Finite(k * 3)
            )
        );
        assert_eq!(NovikovSeries::zero(Mode::Exact).exp().unwrap(), NovikovSeries::one(Mode::Exact));
    }

    #[test]
    fn exp_of_constant_needs_scalar_in_exact_mode() {
        let a = NovikovSeries::constant(Mode::Exact, Scalar::from_ratio(1, 2));
        assert_eq!(a.exp(), Err(Error::NeedsTranscendental));
        let c = Complex64::new(-27.0 / 256.0, 0.0);
        let b = NovikovSeries::constant(Mode::float(), Scalar::Float(c.ln()));
        let e = b.exp().unwrap();
        assert!((e.constant_term().to_complex() - c).norm() < 1e-14);
    }

    #[test]
    fn invert_geometric() {
        let a = ex(&[(0, 1, 1), (1, 1, -1)], fin(3));
        assert_eq!(a.invert().unwrap(), ex(&[(0, 1, 1), (1, 1, 1), (2, 1, 1)], fin(3)));
        let b = NovikovSeries::monomial(Mode::Exact, Scalar::from_ratio(2, 1), q(1, 2));
        assert_eq!(
            b.invert().unwrap(),
            NovikovSeries::monomial(Mode::Exact, Scalar::from_ratio(1, 2), q(-1, 2))
        );
        assert_eq!(NovikovSeries::zero(Mode::Exact).invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn infinite_tail_rejected() {
        let a = ex(&[(0, 1, 1), (1, 1, -1)], Order::Infinite);
        assert_eq!(a.invert(), Err(Error::UnboundedTruncation));
        assert_eq!(ex(&[(1, 1, 1)], Order::Infinite).exp(), Err(Error::UnboundedTruncation));
    }

    #[test]
    fn truncate_examples() {
        let a = ex(&[(0, 1, 1), (1, 1, 1), (2, 1, 1)], Order::Infinite);
        assert_eq!(a.truncate(Order::Finite(q(3, 2))), ex(&[(0, 1, 1), (1, 1, 1)], Order::Finite(q(3, 2))));
        assert_eq!(a.truncate(Order::Infinite), a);
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let a = NovikovSeries::one(Mode::Exact);
        let b = NovikovSeries::one(Mode::float());
        assert_eq!(a.checked_add(&b), Err(Error::ModeMismatch));
        assert_eq!(a.checked_mul(&b), Err(Error::ModeMismatch));
    }

    #[test]
    fn float_products_prune() {
        let m = Mode::float();
        let a = NovikovSeries::new(m, [(ExponentQ::ZERO, Scalar::complex(1e-6, 0.0))], Order::Infinite);
        assert!((&a * &a).is_empty());
    }

    #[test]
    fn grid_monoid_small() {
        assert_eq!(grid_monoid(&[2, 3], 8, 100).unwrap(), vec![0, 2, 3, 4, 5, 6, 7]);
        assert_eq!(grid_monoid(&[1], 5, 3), Err(Error::MonoidOverflow(3)));
    }
}
