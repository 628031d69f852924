use num_complex::Complex64;
use toricpo_core::leading::leading_equations;
use toricpo_core::lifting::{
    case_analysis_two_point, case_potential, lift_bulk, lift_point, monoid_contains, monoid_enumerate,
};
use toricpo_core::potential::{gradient_residual, leading_potential};
use toricpo_core::solver::solve;
use toricpo_core::toric::{cp1, two_point_blowup};
use toricpo_core::{Error, ExponentQ, Mode, NovikovSeries, Order, Scalar};

fn q(n: i64, d: i64) -> ExponentQ {
    ExponentQ::new(n, d)
}

#[test]
fn monoid_examples() {
    assert_eq!(monoid_enumerate(&[q(1, 1)], q(3, 1)).unwrap(), vec![q(0, 1), q(1, 1), q(2, 1), q(3, 1)]);
    assert_eq!(
        monoid_enumerate(&[q(1, 3), q(1, 2)], q(1, 1)).unwrap(),
        vec![q(0, 1), q(1, 3), q(1, 2), q(2, 3), q(5, 6), q(1, 1)]
    );
    assert_eq!(monoid_enumerate(&[q(0, 1)], q(1, 1)), Err(Error::BadGenerator(q(0, 1))));
    assert_eq!(monoid_enumerate(&[q(-1, 2)], q(1, 1)), Err(Error::BadGenerator(q(-1, 2))));
    assert!(monoid_contains(&[q(1, 3), q(1, 2)], q(7, 6)).unwrap());
    assert!(!monoid_contains(&[q(1, 3), q(1, 2)], q(1, 6)).unwrap());
}

#[test]
fn cp1_center_is_already_critical() {
    let out = lift_bulk(&cp1(), &[q(1, 2)], &[Scalar::from_ratio(1, 1)], q(2, 1), &[]).unwrap();
    assert!(out.bulk.entries.iter().all(|e| e.is_zero()));
    assert_eq!(out.residual_valuation, Order::Infinite);
    assert!(out.steps.is_empty());

    let f = leading_potential(&cp1(), &[q(1, 2)], Mode::Exact).unwrap();
    let y0 = [NovikovSeries::one(Mode::Exact)];
    let lift = lift_point(&f, &y0, q(2, 1)).unwrap();
    assert_eq!(lift.y[0].terms(), NovikovSeries::one(Mode::Exact).terms());
    assert_eq!(lift.residual_valuation, Order::Infinite);
}

fn two_point_setup() -> (toricpo_core::MomentPolytope, Vec<ExponentQ>, Vec<Scalar>) {
    let p = two_point_blowup(q(2, 5), q(3, 10)).unwrap();
    let u = vec![q(13, 40), q(3, 10)];
    let (_, _, sys) = leading_equations(&p, &u, None, None).unwrap();
    let sol = solve(&sys).solutions[0].scalars();
    (p, u, sol)
}

#[test]
fn two_point_bulk_lift_certified() {
    let (p, u, sol) = two_point_setup();
    assert_eq!(sol, vec![Scalar::from_ratio(-1, 1), Scalar::from_ratio(1, 1)]);
    let out = lift_bulk(&p, &u, &sol, q(2, 1), &[]).unwrap();
    assert!(out.certified());
    assert!(out.residual_valuation >= Order::Finite(q(2, 1)));
    // supported on the facets of levels 1 and 2 only
    assert!(out.bulk.entries[4].plus.is_empty());
    assert!(!out.steps.is_empty());
    // successive bulks agree below k - S_l on every facet
    let mut prev = vec![NovikovSeries::zero(Mode::Exact); p.num_facets()];
    for st in &out.steps {
        for (i, b) in st.bulk_after.iter().enumerate() {
            let diff = b.with_trunc(Order::Infinite).checked_sub(&prev[i].with_trunc(Order::Infinite)).unwrap();
            let s_l = out.facet_level[i].1;
            assert!(diff.valuation() >= Order::Finite(st.order - s_l), "congruence at order {}", st.order);
        }
        prev = st.bulk_after.clone();
    }
    // gappedness of every exponent and residual order
    let s1 = out.facet_level.iter().map(|f| f.1).min().unwrap();
    for e in &out.bulk.entries {
        for (x, _) in e.plus.terms() {
            assert!(monoid_contains(&out.monoid_gens, *x).unwrap());
        }
    }
    for st in &out.steps {
        assert!(monoid_contains(&out.monoid_gens, st.order - s1).unwrap());
    }
}

#[test]
fn bulk_lift_commutes_with_truncation() {
    let (p, u, sol) = two_point_setup();
    let hi = lift_bulk(&p, &u, &sol, q(2, 1), &[]).unwrap();
    let lo = lift_bulk(&p, &u, &sol, q(3, 2), &[]).unwrap();
    for (i, (a, b)) in hi.bulk.entries.iter().zip(&lo.bulk.entries).enumerate() {
        let cut = Order::Finite(q(3, 2) - hi.facet_level[i].1);
        assert_eq!(a.plus.truncate(cut).terms(), b.plus.truncate(cut).terms());
    }
}

#[test]
fn non_solution_violates_span() {
    let (p, u, _) = two_point_setup();
    // y₂ = 2 fails the level-1 equation, y₂ = 1 only the level-2 one
    let bad = [Scalar::from_ratio(2, 1), Scalar::from_ratio(1, 1)];
    assert_eq!(lift_bulk(&p, &u, &bad, q(2, 1), &[]), Err(Error::SpanViolation { order: q(3, 10) }));
    let bad = [Scalar::from_ratio(1, 1), Scalar::from_ratio(1, 1)];
    assert_eq!(lift_bulk(&p, &u, &bad, q(2, 1), &[]), Err(Error::SpanViolation { order: q(13, 40) }));
}

fn abs_series(s: &NovikovSeries) -> NovikovSeries {
    NovikovSeries::new(s.mode(), s.terms().iter().map(|(e, c)| (*e, Scalar::complex(c.norm(), 0.0))), s.trunc())
}

/// `Σ |v_k| |c_v| |y|^v` with `|y⁻¹|` for negative powers: bounds the size
/// of every partial sum of the gradient, hence its rounding error.
fn modulus_gradient(f: &toricpo_core::PotentialFunction, y: &[NovikovSeries]) -> Vec<NovikovSeries> {
    let pos: Vec<NovikovSeries> = y.iter().map(abs_series).collect();
    let neg: Vec<NovikovSeries> = y.iter().map(|s| abs_series(&s.invert().unwrap())).collect();
    let mut out = vec![NovikovSeries::zero(f.mode); f.n];
    for (v, c) in f.terms() {
        let mut t = abs_series(c);
        for (i, &k) in v.iter().enumerate() {
            let base = if k < 0 { &neg[i] } else { &pos[i] };
            for _ in 0..k.unsigned_abs() {
                t = t.checked_mul(base).unwrap();
            }
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o = o.checked_add(&t.scale(&Scalar::complex(v[k].abs() as f64, 0.0))).unwrap();
        }
    }
    out
}

fn assert_lift_oracle(alpha: ExponentQ, w: &Scalar, kappa: ExponentQ, fiber: &toricpo_core::lifting::CaseFiber) {
    let beta = (ExponentQ::ONE - alpha).div_int(2);
    let p = two_point_blowup(alpha, beta).unwrap();
    for (lift, sol) in fiber.lifts.iter().zip(&fiber.secondary.solutions) {
        let lift = lift.as_ref().expect("lift succeeded");
        let mode = lift.y[0].mode();
        // fresh potential at a different working precision
        let f = case_potential(&p, &fiber.u, w, kappa, mode, Order::Finite(q(3, 1))).unwrap();
        let (g, _) = gradient_residual(&f, &lift.y).unwrap();
        let scale = modulus_gradient(&f, &lift.y);
        for (gi, mi) in g.iter().zip(&scale) {
            for (e, c) in gi.terms() {
                let m = mi.coeff(*e).norm().max(1.0);
                assert!(*e >= q(2, 1) || c.norm() < 1e-6 * m, "independent residual term {e}: {c:?} against {m}");
            }
        }
        let d = lift.y[0].constant_term().to_complex();
        let y2 = lift.y[1].constant_term().to_complex();
        assert!((d - sol.values[1]).norm() < 1e-9);
        assert!((y2 + 1.0).norm() < 1e-12);
    }
}

#[test]
fn small_kappa_gives_cases_one_and_three() {
    let w = Scalar::from_ratio(1, 1);
    let r = case_analysis_two_point(q(2, 5), &w, q(1, 100), q(2, 1)).unwrap();
    assert_eq!(r.fibers.len(), 2);
    let c3 = &r.fibers[0];
    assert_eq!((c3.case, c3.u[0]), (3, q(31, 100)));
    assert_eq!(c3.solution_count(), 1);
    assert_eq!(c3.certified_lifts(), 1);
    let c1 = &r.fibers[1];
    // (1 + α)/4 - κ/2
    assert_eq!((c1.case, c1.u[0]), (1, (q(1, 1) + q(2, 5)).div_int(4) - q(1, 100).div_int(2)));
    assert_eq!(c1.u[0], q(69, 200));
    assert_eq!(c1.solution_count(), 2);
    assert_eq!(c1.certified_lifts(), 2);
    // d̄ = ±sqrt(-2/w), c̄ = w/2
    for s in &c1.secondary.solutions {
        assert!((s.values[0] - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((s.values[1] * s.values[1] + 2.0).norm() < 1e-12);
    }
    // d̄ = -w, c̄ = -w^{-2}
    assert_eq!(c3.secondary.solutions[0].scalars(), vec![Scalar::from_ratio(-1, 1), Scalar::from_ratio(-1, 1)]);
    assert_lift_oracle(q(2, 5), &w, q(1, 100), c3);
    assert_lift_oracle(q(2, 5), &w, q(1, 100), c1);
}

#[test]
fn large_kappa_gives_case_two() {
    let w = Scalar::from_ratio(1, 1);
    let r = case_analysis_two_point(q(2, 5), &w, q(1, 10), q(2, 1)).unwrap();
    assert_eq!(r.fibers.len(), 1);
    let f = &r.fibers[0];
    assert_eq!((f.case, f.u[0]), (2, q(1, 3)));
    assert_eq!(f.solution_count(), 3);
    assert_eq!(f.certified_lifts(), 3);
    assert_lift_oracle(q(2, 5), &w, q(1, 10), f);
}

#[test]
fn threshold_kappa_gives_case_four() {
    let w = Scalar::from_ratio(1, 1);
    let r = case_analysis_two_point(q(2, 5), &w, q(1, 30), q(2, 1)).unwrap();
    let f = &r.fibers[0];
    assert_eq!((f.case, f.u[0]), (4, q(1, 3)));
    assert_eq!(r.kappa_star, q(1, 30));
    assert_eq!(f.solution_count(), 3);
    assert!(!f.multiple_root);
    assert_eq!(f.certified_lifts(), 3);

    let w = Scalar::complex(-(13.5f64.cbrt()), 0.0);
    let r = case_analysis_two_point(q(2, 5), &w, q(1, 30), q(2, 1)).unwrap();
    let f = &r.fibers[0];
    assert!(f.multiple_root);
    assert_eq!(f.secondary.solutions.len(), 2);
    assert_eq!(f.solution_count(), 3);
}
