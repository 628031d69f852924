use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::MomentPolytope;
use crate::linalg::{self, exp_from_q, q_from_exp, Q};
use crate::novikov::ExponentQ;

/// A vertex of the polytope with the facets active there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub point: Vec<ExponentQ>,
    pub active: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationFailure {
    WrongDimension { facet: usize },
    NotPrimitive { facet: usize },
    DuplicateFacet { facet: usize, of: usize },
    Empty,
    Unbounded,
    EmptyInterior,
    Redundant { facet: usize },
    NotSimple { point: Vec<ExponentQ>, active: Vec<usize> },
    NotUnimodular { point: Vec<ExponentQ>, det: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub vertices: Vec<Vertex>,
    pub failures: Vec<ValidationFailure>,
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Brute-force vertex enumeration over all `n`-subsets of facets, sorted
/// lexicographically by point.
pub fn vertices(p: &MomentPolytope) -> Vec<Vertex> {
    let n = p.n;
    let rows: Vec<Vec<Q>> = p.facets.iter().map(|f| f.v.iter().map(|x| linalg::q_from_i64(*x)).collect()).collect();
    let lam: Vec<Q> = p.facets.iter().map(|f| q_from_exp(f.lambda)).collect();
    let mut points: Vec<Vec<Q>> = Vec::new();
    for s in subsets(p.facets.len(), n) {
        let a: Vec<Vec<Q>> = s.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<Q> = s.iter().map(|&i| lam[i].clone()).collect();
        let Some(x) = linalg::solve_square(&a, &b) else { continue };
        let feasible = rows.iter().zip(&lam).all(|(r, l)| {
            let val: Q = r.iter().zip(&x).map(|(a, b)| a * b).sum::<Q>() - l;
            !val.is_negative()
        });
        if feasible && !points.contains(&x) {
            points.push(x);
        }
    }
    points.sort();
    points
        .into_iter()
        .map(|x| {
            let active = rows
                .iter()
                .zip(&lam)
                .enumerate()
                .filter(|(_, (r, l))| (r.iter().zip(&x).map(|(a, b)| a * b).sum::<Q>() - *l).is_zero())
                .map(|(i, _)| i)
                .collect();
            Vertex { point: x.iter().map(exp_from_q).collect(), active }
        })
        .collect()
}

fn bounded(p: &MomentPolytope) -> bool {
    let normals = p.normals();
    if linalg::rank_int(&normals) < p.n {
        return false;
    }
    // Recession cone {d : ⟨v_i, d⟩ ≥ 0} is pointed; its extreme rays lie on
    // lines cut out by n-1 independent normals.
    let q = linalg::int_matrix_to_q(&normals);
    for s in subsets(normals.len(), p.n - 1) {
        let a: Vec<Vec<Q>> = s.iter().map(|&i| q[i].clone()).collect();
        let ns = linalg::nullspace(&a, p.n);
        if ns.len() != 1 {
            continue;
        }
        let d = &ns[0];
        for sign in [1i64, -1] {
            let ok = q.iter().all(|r| {
                let val: Q = r.iter().zip(d).map(|(a, b)| a * b).sum::<Q>() * Q::from_integer(sign.into());
                !val.is_negative()
            });
            if ok {
                return false;
            }
        }
    }
    true
}

/// Check smoothness, boundedness, nonempty interior and irredundancy.
pub fn validate(p: &MomentPolytope) -> ValidationReport {
    let mut failures = Vec::new();
    for (i, f) in p.facets.iter().enumerate() {
        if f.v.len() != p.n {
            failures.push(ValidationFailure::WrongDimension { facet: i });
        } else if linalg::gcd_vec(&f.v) != 1 {
            failures.push(ValidationFailure::NotPrimitive { facet: i });
        }
        if let Some(j) = p.facets[..i].iter().position(|g| g == f) {
            failures.push(ValidationFailure::DuplicateFacet { facet: i, of: j });
        }
    }
    if !failures.is_empty() || p.n == 0 {
        return ValidationReport { valid: false, vertices: Vec::new(), failures };
    }
    let verts = vertices(p);
    if verts.is_empty() {
        failures.push(if bounded(p) { ValidationFailure::Empty } else { ValidationFailure::Unbounded });
        return ValidationReport { valid: false, vertices: verts, failures };
    }
    if !bounded(p) {
        failures.push(ValidationFailure::Unbounded);
    }
    let n = p.n;
    let k = verts.len() as i64;
    let centroid: Vec<ExponentQ> =
        (0..n).map(|c| verts.iter().map(|v| v.point[c]).sum::<ExponentQ>().div_int(k)).collect();
    if !p.ell_values(&centroid).map(|l| l.iter().all(|x| x.is_positive())).unwrap_or(false) {
        failures.push(ValidationFailure::EmptyInterior);
    }
    for i in 0..p.facets.len() {
        let on: Vec<&Vertex> = verts.iter().filter(|v| v.active.contains(&i)).collect();
        let affine_rank = if on.is_empty() {
            0
        } else {
            let base = &on[0].point;
            let diffs: Vec<Vec<Q>> = on[1..]
                .iter()
                .map(|v| v.point.iter().zip(base).map(|(a, b)| q_from_exp(*a - *b)).collect())
                .collect();
            linalg::rank_q(&diffs) + 1
        };
        if affine_rank < n {
            failures.push(ValidationFailure::Redundant { facet: i });
        }
    }
    for v in &verts {
        if v.active.len() != n {
            failures.push(ValidationFailure::NotSimple { point: v.point.clone(), active: v.active.clone() });
            continue;
        }
        let m: Vec<Vec<i64>> = v.active.iter().map(|&i| p.facets[i].v.clone()).collect();
        let det = linalg::det_int(&m);
        if det.abs() != BigInt::from(1) {
            failures.push(ValidationFailure::NotUnimodular { point: v.point.clone(), det: det.to_string() });
        }
    }
    ValidationReport { valid: failures.is_empty(), vertices: verts, failures }
}
