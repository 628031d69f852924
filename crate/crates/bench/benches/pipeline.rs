use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use toricpo_core::classify::{scan, ClassifyOptions, Row};
use toricpo_core::leading::leading_equations;
use toricpo_core::lifting::{case_analysis_two_point, lift_bulk};
use toricpo_core::solver::solve;
use toricpo_core::toric::two_point_blowup;
use toricpo_bench::{q, unit_series};
use toricpo_core::{Mode, Scalar};

fn novikov(c: &mut Criterion) {
    for (name, mode) in [("exact", Mode::Exact), ("float", Mode::float())] {
        let a = unit_series(mode, 12);
        let b = unit_series(mode, 9);
        c.bench_function(&format!("novikov_mul_{name}"), |bn| bn.iter(|| black_box(&a).checked_mul(black_box(&b)).unwrap()));
        c.bench_function(&format!("novikov_invert_{name}"), |bn| bn.iter(|| black_box(&a).invert().unwrap()));
    }
}

fn two_point(c: &mut Criterion) {
    let p = two_point_blowup(q(2, 5), q(3, 10)).unwrap();
    let u = [q(13, 40), q(3, 10)];
    c.bench_function("leading_and_solve_two_point", |bn| {
        bn.iter(|| {
            let (_, _, sys) = leading_equations(&p, black_box(&u), None, None).unwrap();
            solve(&sys)
        })
    });
    let (_, _, sys) = leading_equations(&p, &u, None, None).unwrap();
    let y = solve(&sys).solutions[0].scalars();
    c.bench_function("lift_bulk_two_point_n2", |bn| bn.iter(|| lift_bulk(&p, &u, black_box(&y), q(2, 1), &[]).unwrap()));
    c.bench_function("case_analysis_two_point", |bn| {
        bn.iter(|| case_analysis_two_point(q(2, 5), &Scalar::from_ratio(1, 1), q(1, 100), q(2, 1)).unwrap())
    });
    let row = Row::parse("u2=3/10").unwrap();
    let opts = ClassifyOptions { lift_order: None, coeffs: None };
    c.bench_function("scan_row_two_point", |bn| bn.iter(|| scan(&p, q(1, 40), Some(row.clone()), &opts).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = novikov, two_point
}
criterion_main!(benches);
