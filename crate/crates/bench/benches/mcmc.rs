use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spatperm::Alpha;
use spatperm_bench::poisson_state;

const STEPS: u64 = 10_000;

fn moves(c: &mut Criterion) {
    let mut g = c.benchmark_group("metropolis");
    g.throughput(Throughput::Elements(STEPS));
    for n in [100, 1000, 10_000] {
        let (mut state, spec) = poisson_state(n, 0.1, Alpha::new(1.0).unwrap(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        g.bench_with_input(BenchmarkId::new("swap", n), &n, |b, _| {
            b.iter(|| {
                for _ in 0..STEPS {
                    black_box(state.step_swap(&spec, &mut rng));
                }
            })
        });
        g.bench_with_input(BenchmarkId::new("cycle3", n), &n, |b, _| {
            b.iter(|| {
                for _ in 0..STEPS {
                    black_box(state.step_cycle3(&spec, &mut rng));
                }
            })
        });
        g.bench_with_input(BenchmarkId::new("point", n), &n, |b, _| {
            b.iter(|| {
                for _ in 0..STEPS {
                    black_box(state.step_point(&spec, 0.5, &mut rng));
                }
            })
        });
    }
    g.finish();
}

criterion_group!(benches, moves);
criterion_main!(benches);
