use criterion::{black_box, criterion_group, criterion_main, Criterion};
use netput_eff_bench::hull_fixture;
use netput_eff_core::dual::dual_value;
use netput_eff_core::primal::evaluate_p;
use netput_eff_core::solver::{solve_lp, LinearProgram, LpConstraint, VarBound};
use netput_eff_core::PParameter;

fn bench_evaluation(c: &mut Criterion) {
    let (tech, z, g) = hull_fixture();
    let mut group = c.benchmark_group("evaluate");
    for (label, p) in [
        ("joint", PParameter::NegInfinity),
        ("mean", PParameter::Finite(1.0)),
        ("half", PParameter::Finite(0.5)),
        ("square", PParameter::Finite(2.0)),
    ] {
        group.bench_function(label, |b| {
            b.iter(|| evaluate_p(black_box(&tech), black_box(&z), black_box(&g), p).unwrap())
        });
    }
    group.finish();
}

fn bench_dual(c: &mut Criterion) {
    let (tech, z, g) = hull_fixture();
    c.bench_function("dual_half_order", |b| {
        b.iter(|| dual_value(black_box(&tech), &z, &g, PParameter::Finite(0.5)).unwrap())
    });
}

fn bench_lp(c: &mut Criterion) {
    // A dense 20-variable, 30-row program.
    let n = 20;
    let m = 30;
    let objective: Vec<f64> = (0..n).map(|j| 1.0 + (j as f64 * 0.37).sin()).collect();
    let constraints: Vec<LpConstraint> = (0..m)
        .map(|i| {
            let coeffs: Vec<f64> =
                (0..n).map(|j| 0.5 + ((i * 7 + j * 3) as f64 * 0.11).cos().abs()).collect();
            LpConstraint::new(coeffs, 10.0 + i as f64)
        })
        .collect();
    let lp = LinearProgram { objective, constraints, bounds: vec![VarBound::NonNegative; n] };
    c.bench_function("simplex_dense_20x30", |b| {
        b.iter(|| solve_lp(black_box(&lp)).unwrap())
    });
}

criterion_group!(benches, bench_evaluation, bench_dual, bench_lp);
criterion_main!(benches);
