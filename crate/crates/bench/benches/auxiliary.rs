use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use threecenter_bench::legendre_params;
use threecenter_core::auxiliary::{aux_general_direct, aux_general_expanded, aux_reduced_with_strategy};
use threecenter_core::{LegendreStrategy, OrbitalIndices, PrecisionContext};

fn reduced(c: &mut Criterion) {
    let mut group = c.benchmark_group("aux_reduced");
    group.sample_size(10);
    for digits in [15u32, 25] {
        let ctx = PrecisionContext::new(digits).unwrap();
        let params = legendre_params(&ctx);
        let tol = ctx.default_tolerance();
        let (n1, n2) = (ctx.num(3), ctx.num(2));
        for strategy in LegendreStrategy::ALL {
            group.bench_with_input(BenchmarkId::new(strategy.to_string(), digits), &digits, |b, _| {
                b.iter(|| aux_reduced_with_strategy(3, 1, 0, &n1, &n2, &params, &tol, strategy, &ctx).unwrap())
            });
        }
    }
    group.finish();
}

fn general(c: &mut Criterion) {
    let mut group = c.benchmark_group("aux_general");
    group.sample_size(10);
    let ctx = PrecisionContext::new(15).unwrap();
    let params = legendre_params(&ctx);
    let tol = ctx.default_tolerance();
    let a = OrbitalIndices::new(ctx.num(2), 1, 0).unwrap();
    let b = OrbitalIndices::new(ctx.parse("2.5").unwrap(), 1, 0).unwrap();
    group.bench_function("direct", |bench| bench.iter(|| aux_general_direct(2, 0, &a, &b, &params, &tol, &ctx).unwrap()));
    group.bench_function("expanded", |bench| {
        bench.iter(|| aux_general_expanded(2, 0, &a, &b, &params, &tol, &ctx).unwrap())
    });
    group.finish();
}

criterion_group!(benches, reduced, general);
criterion_main!(benches);
