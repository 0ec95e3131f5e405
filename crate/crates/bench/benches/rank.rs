use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hk_core::{rank_fp, SparseFpMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, per_row: usize, p: u32, seed: u64) -> SparseFpMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trip = Vec::new();
    for r in 0..n {
        for _ in 0..per_row {
            trip.push((r, rng.gen_range(0..n), rng.gen_range(1..p)));
        }
    }
    SparseFpMatrix::from_triplets(n, n, p, trip).unwrap()
}

fn bench_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_fp");
    for &p in &[2u32, 3] {
        for &n in &[200usize, 1000] {
            let m = random_matrix(n, 3, p, 7);
            group.bench_with_input(BenchmarkId::new(format!("p{p}"), n), &m, |b, m| {
                b.iter(|| rank_fp(m))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_rank);
criterion_main!(benches);
