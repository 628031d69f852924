use super::{validate, Facet, MomentPolytope};
use crate::error::{Error, Result};
use crate::novikov::ExponentQ;

/// Names accepted by [`build_example`].
pub const EXAMPLE_NAMES: &[&str] =
    &["cp1", "cpn", "two_point_blowup", "k_point_blowup", "one_point_blowup_monotone"];

fn q(n: i64, d: i64) -> ExponentQ {
    ExponentQ::new(n, d)
}

pub fn cp1() -> MomentPolytope {
    MomentPolytope::new(
        1,
        vec![Facet::new(vec![1], ExponentQ::ZERO), Facet::new(vec![-1], ExponentQ::integer(-1))],
        "cp1",
        true,
    )
}

/// The standard simplex `u_i ≥ 0, Σ u_i ≤ 1`.
pub fn cpn(n: usize) -> MomentPolytope {
    let mut facets: Vec<Facet> = (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            Facet::new(v, ExponentQ::ZERO)
        })
        .collect();
    facets.push(Facet::new(vec![-1; n], ExponentQ::integer(-1)));
    MomentPolytope::new(n, facets, format!("cp{n}"), true)
}

/// `0 ≤ u_1, 0 ≤ u_2 ≤ 1-α, β ≤ u_1+u_2 ≤ 1`, facets in the order
/// `u_1, u_2, 1-α-u_2, u_1+u_2-β, 1-u_1-u_2`.
pub fn two_point_blowup(alpha: ExponentQ, beta: ExponentQ) -> Result<MomentPolytope> {
    if !(alpha.is_positive() && beta.is_positive() && alpha + beta < ExponentQ::ONE) {
        return Err(Error::BadKahlerParams(format!(
            "two_point_blowup needs 0 < alpha, beta and alpha + beta < 1, got ({alpha}, {beta})"
        )));
    }
    let p = MomentPolytope::new(
        2,
        vec![
            Facet::new(vec![1, 0], ExponentQ::ZERO),
            Facet::new(vec![0, 1], ExponentQ::ZERO),
            Facet::new(vec![0, -1], alpha - ExponentQ::ONE),
            Facet::new(vec![1, 1], beta),
            Facet::new(vec![-1, -1], ExponentQ::integer(-1)),
        ],
        format!("two_point_blowup({alpha},{beta})"),
        true,
    );
    checked(p)
}

/// Iterated blow-up of the two-point blow-up with `β = (1-α)/2`: the `j`-th
/// extra facet cuts the corner between `u_2 ≥ 0` and the previous facet at
/// depth `ε_j`. The first extra facet is `u_1 ≤ 1 - ε_3`.
pub fn k_point_blowup(alpha: ExponentQ, eps: &[ExponentQ]) -> Result<MomentPolytope> {
    if !(q(1, 3) < alpha && alpha < ExponentQ::ONE) {
        return Err(Error::BadKahlerParams(format!("k_point_blowup needs 1/3 < alpha < 1, got {alpha}")));
    }
    if let Some(e) = eps.iter().find(|e| !e.is_positive()) {
        return Err(Error::BadKahlerParams(format!("blow-up sizes must be positive, got {e}")));
    }
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let mut p = two_point_blowup(alpha, beta)?;
    let bottom = p.facets[1].clone();
    for &e in eps {
        let last = p.facets.last().expect("nonempty").clone();
        let v: Vec<i64> = bottom.v.iter().zip(&last.v).map(|(a, b)| a + b).collect();
        p.facets.push(Facet::new(v, bottom.lambda + last.lambda + e));
    }
    let k = 2 + eps.len();
    p.name = format!("k_point_blowup(k={k},alpha={alpha})");
    // Up to three blow-ups the polygon is a hexagon or smaller and Fano.
    p.fano = k <= 3;
    checked(p)
}

/// `u_1, u_2 ≥ 0, u_1 + u_2 ≤ 1, u_2 ≤ 2/3`, facets in that order.
pub fn one_point_blowup_monotone() -> MomentPolytope {
    MomentPolytope::new(
        2,
        vec![
            Facet::new(vec![1, 0], ExponentQ::ZERO),
            Facet::new(vec![0, 1], ExponentQ::ZERO),
            Facet::new(vec![-1, -1], ExponentQ::integer(-1)),
            Facet::new(vec![0, -1], q(-2, 3)),
        ],
        "one_point_blowup_monotone",
        true,
    )
}

fn checked(p: MomentPolytope) -> Result<MomentPolytope> {
    let rep = validate(&p);
    if rep.valid {
        Ok(p)
    } else {
        Err(Error::BadKahlerParams(format!("{} is not a smooth polytope: {:?}", p.name, rep.failures)))
    }
}

/// Build a named example polytope.
pub fn build_example(name: &str, params: &[ExponentQ]) -> Result<MomentPolytope> {
    let need = |k: usize| -> Result<()> {
        if params.len() < k {
            Err(Error::BadKahlerParams(format!("{name} needs {k} parameter(s), got {}", params.len())))
        } else {
            Ok(())
        }
    };
    match name {
        "cp1" => Ok(cp1()),
        "cpn" => {
            let n = match params.first() {
                Some(x) if x.denom() == 1 && x.numer() >= 1 && x.numer() <= 6 => x.numer() as usize,
                Some(x) => return Err(Error::BadKahlerParams(format!("cpn needs an integer 1..6, got {x}"))),
                None => 2,
            };
            Ok(cpn(n))
        }
        "two_point_blowup" => {
            need(1)?;
            let beta = params.get(1).copied().unwrap_or((ExponentQ::ONE - params[0]).div_int(2));
            two_point_blowup(params[0], beta)
        }
        "k_point_blowup" => {
            need(1)?;
            k_point_blowup(params[0], &params[1..])
        }
        "one_point_blowup_monotone" => Ok(one_point_blowup_monotone()),
        _ => Err(Error::UnknownExample(name.to_string())),
    }
}
