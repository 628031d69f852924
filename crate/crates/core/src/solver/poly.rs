//! Dense univariate polynomials over `Q` or `C`.

use std::fmt::Debug;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::novikov::{rational_to_f64, Scalar};

/// Relative threshold below which float coefficients count as zero in gcds.
pub const GCD_THRESHOLD: f64 = 1e-8;

pub trait Field: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(k: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    /// Zero test relative to `scale` (exact fields ignore it).
    fn negligible(&self, scale: f64) -> bool;
    fn to_c(&self) -> Complex64;
    fn magnitude(&self) -> f64 {
        self.to_c().norm()
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(k: i64) -> Self {
        BigRational::from_integer(k.into())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn to_c(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(k: i64) -> Self {
        Complex64::new(k as f64, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn negligible(&self, scale: f64) -> bool {
        self.norm() <= GCD_THRESHOLD * scale.max(f64::MIN_POSITIVE)
    }
    fn to_c(&self) -> Complex64 {
        *self
    }
}

/// Coefficients in ascending degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<F: Field> {
    pub c: Vec<F>,
}

impl<F: Field> UniPoly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.negligible(0.0) && *x == F::zero()) {
            c.pop();
        }
        UniPoly { c }
    }

    /// Drop trailing coefficients that are negligible relative to the norm.
    pub fn trim_relative(mut self) -> Self {
        let scale = self.norm();
        while self.c.last().is_some_and(|x| x.negligible(scale)) {
            self.c.pop();
        }
        self
    }

    pub fn zero() -> Self {
        UniPoly { c: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(F::magnitude).fold(0.0, f64::max)
    }

    pub fn lead(&self) -> &F {
        self.c.last().expect("zero polynomial has no leading coefficient")
    }

    pub fn eval(&self, x: &F) -> F {
        self.c.iter().rev().fold(F::zero(), |acc, a| acc.mul(x).add(a))
    }

    pub fn eval_c(&self, x: Complex64) -> Complex64 {
        self.c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * x + a.to_c())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.c.iter().enumerate().skip(1).map(|(k, a)| a.mul(&F::from_i64(k as i64))).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![F::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Self::new(c)
    }

    pub fn monic(&self) -> Self {
        let l = self.lead().clone();
        Self::new(self.c.iter().map(|a| a.div(&l)).collect())
    }

    /// Division with remainder; float remainders are trimmed relative to the
    /// dividend's norm.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let scale = self.norm().max(d.norm());
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        let l = d.lead().clone();
        for k in (0..q.len()).rev() {
            let f = r[k + dd].div(&l);
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] = r[k + j].sub(&f.mul(b));
            }
            r[k + dd] = F::zero();
            q[k] = f;
        }
        r.truncate(dd);
        let mut rem = UniPoly { c: r };
        while rem.c.last().is_some_and(|x| x.negligible(scale)) {
            rem.c.pop();
        }
        (Self::new(q), rem)
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Yun's square-free decomposition: `p = lc · Π f_k^k`, returns `(f_k, k)`
    /// for nonconstant `f_k`.
    pub fn squarefree(&self) -> Vec<(Self, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let (mut b, _) = f.divrem(&a);
        let (mut c, _) = df.divrem(&a);
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 && k <= self.c.len() {
            let d = c.sub_poly(&b.derivative()).trim_relative();
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), k));
            }
            b = b.divrem(&g).0;
            c = d.divrem(&g).0;
            k += 1;
        }
        out
    }

    pub fn sub_poly(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).cloned().unwrap_or_else(F::zero);
                let b = o.c.get(i).cloned().unwrap_or_else(F::zero);
                a.sub(&b)
            })
            .collect();
        Self::new(c)
    }

    pub fn to_complex(&self) -> UniPoly<Complex64> {
        UniPoly::new(self.c.iter().map(F::to_c).collect())
    }

    /// Remove the factor `x^k` with `k` maximal; returns `k`.
    pub fn strip_zero_roots(&mut self) -> usize {
        let scale = self.norm();
        let k = self.c.iter().take_while(|a| a.negligible(scale)).count();
        self.c.drain(..k.min(self.c.len()));
        k
    }
}

/// Convert exact scalars to a polynomial over `Q`, or `None` if any is float.
pub fn exact_coeffs(c: &[Scalar]) -> Option<Vec<BigRational>> {
    c.iter().map(|s| s.as_rational().cloned()).collect()
}
