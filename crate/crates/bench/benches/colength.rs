use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hk_core::{build_mult_matrix, colength, parse_trinomial, rank_fp, FrobeniusBox};

fn bench_colength(c: &mut Criterion) {
    let mut group = c.benchmark_group("colength");
    group.sample_size(10);
    let cases = [
        ("x0^2 + x0*x1 + x1^2", 8),
        ("x0 + x1 + x2", 5),
        ("x0^3 + x0*x1^2 + x1*x2^2", 5),
    ];
    for (poly, n) in cases {
        let f = parse_trinomial(poly, 2).unwrap();
        group.bench_with_input(BenchmarkId::new(poly, n), &n, |b, &n| {
            b.iter(|| colength(&f, n).unwrap())
        });
    }
    // generic path: materialise the matrix and take its rank
    let f = parse_trinomial("x0^3 + x0*x1^2 + x1*x2^2", 2).unwrap();
    let bx = FrobeniusBox::new(2, 3, 3).unwrap();
    group.bench_function("generic x0^3 + x0*x1^2 + x1*x2^2 n=3", |b| {
        b.iter(|| rank_fp(&build_mult_matrix(&f, &bx).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_colength);
criterion_main!(benches);
