//! Laurent polynomials with scalar coefficients, the equations of leading systems.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::novikov::{Mode, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    pub nvars: usize,
    pub mode: Mode,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize, mode: Mode) -> Self {
        LaurentPoly { nvars, mode, terms: BTreeMap::new() }
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, Scalar)>>(nvars: usize, mode: Mode, terms: I) -> Self {
        let mut p = Self::zero(nvars, mode);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: Scalar) {
        assert_eq!(e.len(), self.nvars, "exponent length");
        let c = self.mode.coerce(c).expect("scalar mode mismatch");
        let mode = self.mode;
        let slot = self.terms.entry(e.clone()).or_insert_with(|| mode.zero());
        *slot = &*slot + &c;
        if mode.negligible(slot) {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[i64]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.mode.zero())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables that occur with a nonzero exponent in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&i| self.terms.keys().any(|e| e[i] != 0)).collect()
    }

    /// `∂/∂y_k`.
    pub fn partial(&self, k: usize) -> LaurentPoly {
        let mut out = Self::zero(self.nvars, self.mode);
        for (e, c) in &self.terms {
            if e[k] != 0 {
                let mut f = e.clone();
                f[k] -= 1;
                out.add_term(f, c.mul_int(e[k]));
            }
        }
        out
    }

    /// `y_k ∂/∂y_k`.
    pub fn log_partial(&self, k: usize) -> LaurentPoly {
        let mut out = Self::zero(self.nvars, self.mode);
        for (e, c) in &self.terms {
            if e[k] != 0 {
                out.add_term(e.clone(), c.mul_int(e[k]));
            }
        }
        out
    }

    /// Multiply by the monomial `y^m`.
    pub fn shift(&self, m: &[i64]) -> LaurentPoly {
        let terms = self.terms.iter().map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a + b).collect(), c.clone()));
        Self::from_terms(self.nvars, self.mode, terms)
    }

    pub fn eval_complex(&self, y: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = c.to_complex();
                for (yi, k) in y.iter().zip(e) {
                    v *= yi.powi(*k as i32);
                }
                v
            })
            .sum()
    }

    /// Coefficientwise map into float mode.
    pub fn to_float(&self, tol: f64) -> LaurentPoly {
        let mode = Mode::Float { tol };
        Self::from_terms(
            self.nvars,
            mode,
            self.terms.iter().map(|(e, c)| (e.clone(), Scalar::Float(c.to_complex()))),
        )
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(Scalar::norm).fold(0.0, f64::max)
    }

    /// Render with the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(k, _)| **k != 0)
                .map(|(k, n)| if *k == 1 { n.clone() } else { format!("{n}^{k}") })
                .collect();
            let cs = c.to_string();
            let body = match (mono.is_empty(), c.is_one()) {
                (true, _) => cs,
                (false, true) => mono.join("*"),
                (false, false) => format!("{cs}*{}", mono.join("*")),
            };
            if i > 0 {
                s.push_str(" + ");
            }
            s.push_str(&body);
        }
        s
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("y{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}
