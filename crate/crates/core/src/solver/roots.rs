//! Roots of univariate complex polynomials.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::UniPoly;

/// All roots of a polynomial, each listed once per multiplicity of the input.
/// Expects a square-free input for accurate results.
pub fn roots(p: &UniPoly<Complex64>) -> Vec<Complex64> {
    let Some(d) = p.degree() else { return Vec::new() };
    if d == 0 {
        return Vec::new();
    }
    let monic = p.monic();
    let raw = companion_eigenvalues(&monic).unwrap_or_else(|| aberth(&monic));
    let mut out: Vec<Complex64> = raw.into_iter().map(|z| polish(&monic, z)).collect();
    out.sort_by(|a, b| cmp_complex(*a, *b));
    out
}

fn companion_eigenvalues(p: &UniPoly<Complex64>) -> Option<Vec<Complex64>> {
    let d = p.degree()?;
    if d == 1 {
        return Some(vec![-p.c[0]]);
    }
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        m[(i, d - 1)] = -p.c[i];
    }
    let schur = m.schur();
    let ev = schur.eigenvalues()?;
    let v: Vec<Complex64> = ev.iter().copied().collect();
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(v)
}

/// Aberth–Ehrlich simultaneous iteration.
fn aberth(p: &UniPoly<Complex64>) -> Vec<Complex64> {
    let d = p.degree().unwrap_or(0);
    let dp = p.derivative();
    let radius = 1.0 + p.c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius * 0.7, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let ratio = p.eval_c(z[i]) / dp.eval_c(z[i]);
            let s: Complex64 = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// A few Newton steps, kept only while they reduce the residual.
pub fn polish(p: &UniPoly<Complex64>, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    let mut r = p.eval_c(z).norm();
    for _ in 0..20 {
        let d = dp.eval_c(z);
        if d.norm() == 0.0 {
            break;
        }
        let nz = z - p.eval_c(z) / d;
        let nr = p.eval_c(nz).norm();
        if !(nr < r) {
            break;
        }
        z = nz;
        r = nr;
    }
    z
}

pub fn cmp_complex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_roots_of_unity() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let p = UniPoly::new(vec![c(-1.0), c(0.0), c(0.0), c(1.0)]);
        let r = roots(&p);
        assert_eq!(r.len(), 3);
        for z in &r {
            assert!((z.powu(3) - c(1.0)).norm() < 1e-13);
        }
        let a = aberth(&p);
        for z in &a {
            assert!((z.powu(3) - c(1.0)).norm() < 1e-12);
        }
    }
}
