//! Resultants of bivariate polynomials by evaluation and interpolation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;

use super::poly::{Field, UniPoly};

/// Polynomial in `(x, y)` with nonnegative exponents, keyed by `(deg_x, deg_y)`.
pub type BiPoly<F> = BTreeMap<(usize, usize), F>;

pub fn deg_y<F: Field>(p: &BiPoly<F>) -> usize {
    p.keys().map(|k| k.1).max().unwrap_or(0)
}

pub fn deg_x<F: Field>(p: &BiPoly<F>) -> usize {
    p.keys().map(|k| k.0).max().unwrap_or(0)
}

/// Coefficients of `y^k` as polynomials in `x`.
pub fn y_coeffs<F: Field>(p: &BiPoly<F>) -> Vec<UniPoly<F>> {
    let dy = deg_y(p);
    let dx = deg_x(p);
    let mut out = vec![vec![F::zero(); dx + 1]; dy + 1];
    for (&(i, j), c) in p {
        out[j][i] = c.clone();
    }
    out.into_iter().map(UniPoly::new).collect()
}

/// Determinant by Gaussian elimination with largest-magnitude pivots.
pub fn det<F: Field>(mut m: Vec<Vec<F>>) -> F {
    let n = m.len();
    let mut acc = F::one();
    for k in 0..n {
        let piv = (k..n)
            .filter(|&i| m[i][k] != F::zero())
            .max_by(|&a, &b| m[a][k].magnitude().total_cmp(&m[b][k].magnitude()));
        let Some(p) = piv else { return F::zero() };
        if p != k {
            m.swap(p, k);
            acc = F::zero().sub(&acc);
        }
        let pv = m[k][k].clone();
        acc = acc.mul(&pv);
        for i in k + 1..n {
            let f = m[i][k].div(&pv);
            if f == F::zero() {
                continue;
            }
            for j in k..n {
                let t = f.mul(&m[k][j]);
                m[i][j] = m[i][j].sub(&t);
            }
        }
    }
    acc
}

/// Sylvester matrix of `Σ a_k y^k` and `Σ b_k y^k` with formal degrees
/// `a.len()-1`, `b.len()-1`.
fn sylvester<F: Field>(a: &[F], b: &[F]) -> Vec<Vec<F>> {
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n = da + db;
    let mut m = vec![vec![F::zero(); n]; n];
    for r in 0..db {
        for (k, c) in a.iter().enumerate() {
            m[r][r + da - k] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in b.iter().enumerate() {
            m[db + r][r + db - k] = c.clone();
        }
    }
    m
}

/// Interpolation nodes and the matching inverse transform.
pub trait Interpolate: Field {
    fn nodes(count: usize) -> Vec<Self>;
    fn interpolate(nodes: &[Self], values: &[Self]) -> UniPoly<Self>;
}

impl Interpolate for BigRational {
    fn nodes(count: usize) -> Vec<Self> {
        (0..count as i64).map(BigRational::from_i64).collect()
    }

    /// Newton divided differences, converted to the monomial basis.
    fn interpolate(nodes: &[Self], values: &[Self]) -> UniPoly<Self> {
        let n = nodes.len();
        let mut dd = values.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&nodes[i] - &nodes[i - j]);
            }
        }
        let mut acc = UniPoly::zero();
        for i in (0..n).rev() {
            let lin = UniPoly::new(vec![-nodes[i].clone(), BigRational::from_i64(1)]);
            acc = acc.mul(&lin).sub_poly(&UniPoly::new(vec![-dd[i].clone()]));
        }
        acc
    }
}

impl Interpolate for Complex64 {
    fn nodes(count: usize) -> Vec<Self> {
        (0..count)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / count as f64))
            .collect()
    }

    /// Inverse discrete Fourier transform at roots of unity.
    fn interpolate(nodes: &[Self], values: &[Self]) -> UniPoly<Self> {
        let n = nodes.len();
        let c = (0..n)
            .map(|k| {
                let s: Complex64 = values.iter().zip(nodes).map(|(v, w)| v * w.powu(k as u32).conj()).sum();
                s / n as f64
            })
            .collect();
        UniPoly::new(c).trim_relative()
    }
}

/// `Res_y(p, q)` as a polynomial in `x`.
pub fn resultant_y<F: Interpolate>(p: &BiPoly<F>, q: &BiPoly<F>) -> UniPoly<F> {
    let (pc, qc) = (y_coeffs(p), y_coeffs(q));
    let bound = (pc.len() - 1) * deg_x(q) + (qc.len() - 1) * deg_x(p);
    let nodes = F::nodes(bound + 1);
    let values: Vec<F> = nodes
        .iter()
        .map(|x| {
            let a: Vec<F> = pc.iter().map(|c| c.eval(x)).collect();
            let b: Vec<F> = qc.iter().map(|c| c.eval(x)).collect();
            det(sylvester(&a, &b))
        })
        .collect();
    F::interpolate(&nodes, &values)
}
