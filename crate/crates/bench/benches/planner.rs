use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcc_bench::instance;
use qcc_core::fixtures;
use qcc_core::planner::{anytime_compile, greedy_compile, optimal_compile, Budget, Limits};
use qcc_core::validator::{remove_superfluous, validate};

fn greedy(c: &mut Criterion) {
    let mut g = c.benchmark_group("greedy");
    for chip in ["N8", "N21", "N40"] {
        let problem = instance(chip, 1.0, 1, 0);
        g.bench_with_input(BenchmarkId::from_parameter(chip), &problem, |b, p| b.iter(|| greedy_compile(p, 0)));
    }
    g.finish();
}

fn anytime(c: &mut Criterion) {
    let mut g = c.benchmark_group("anytime_500_iterations");
    g.sample_size(10);
    for (chip, p) in [("N8", 1), ("N8", 2), ("N21", 1)] {
        let problem = instance(chip, 1.0, p, 0);
        g.bench_with_input(BenchmarkId::new(chip, p), &problem, |b, prob| {
            b.iter(|| anytime_compile(prob, 0, Budget::iterations(500)))
        });
    }
    g.finish();
}

fn optimal(c: &mut Criterion) {
    let problem = fixtures::two_goal_tradeoff();
    c.bench_function("optimal_tradeoff", |b| b.iter(|| optimal_compile(&problem, Limits::default()).unwrap()));
}

fn validation(c: &mut Criterion) {
    let problem = instance("N40", 1.0, 1, 0);
    let plan = greedy_compile(&problem, 0);
    c.bench_function("validate_N40", |b| b.iter(|| validate(&plan, &problem)));
    let small = instance("N8", 1.0, 1, 0);
    let small_plan = greedy_compile(&small, 0);
    c.bench_function("remove_superfluous_N8", |b| b.iter(|| remove_superfluous(&small_plan, &small).unwrap()));
}

criterion_group!(benches, greedy, anytime, optimal, validation);
criterion_main!(benches);
