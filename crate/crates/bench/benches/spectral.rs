use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spatperm::spectral::partition_table;
use spatperm::verify::TAIL_BOUND;
use spatperm::{build_mode_set, Alpha};
use spatperm_bench::gaussian;

fn table_build(c: &mut Criterion) {
    let model = gaussian(3);
    let mut g = c.benchmark_group("partition_table");
    g.sample_size(10);
    for l in [6.0, 10.0, 14.0] {
        let modes = Arc::new(build_mode_set(&model, l, TAIL_BOUND, usize::MAX).unwrap());
        let n = (0.1 * l * l * l) as usize;
        for alpha in [Alpha::ZERO, Alpha::INFINITY] {
            g.bench_with_input(
                BenchmarkId::new(format!("L{l}_alpha_{alpha}"), n),
                &n,
                |b, &n| b.iter(|| partition_table(modes.clone(), black_box(n), alpha).unwrap()),
            );
        }
    }
    g.finish();
}

fn mode_set(c: &mut Criterion) {
    let model = gaussian(3);
    c.bench_function("build_mode_set_L10", |b| {
        b.iter(|| build_mode_set(&model, black_box(10.0), TAIL_BOUND, usize::MAX).unwrap())
    });
}

criterion_group!(benches, table_build, mode_set);
criterion_main!(benches);
