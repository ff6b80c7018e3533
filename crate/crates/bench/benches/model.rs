use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use spatperm::model::ModelKind;
use spatperm::DispersionModel;

fn epsilon(c: &mut Criterion) {
    let ks: Vec<f64> = (0..1000).map(|i| i as f64 * 0.005).collect();
    let models = [
        ("gaussian", DispersionModel::gaussian(1.0, 3).unwrap()),
        (
            "exponential3d",
            DispersionModel::new(ModelKind::Exponential3d, 1.0, 3, None).unwrap(),
        ),
        (
            "power_law1d",
            DispersionModel::new(ModelKind::PowerLaw1d, 1.0, 1, None).unwrap(),
        ),
    ];
    let mut g = c.benchmark_group("epsilon_1000");
    for (name, m) in &models {
        g.bench_function(*name, |b| {
            b.iter(|| {
                ks.iter()
                    .map(|&k| m.epsilon_radial(black_box(k)).unwrap())
                    .sum::<f64>()
            })
        });
    }
    g.finish();
}

fn periodized_xi(c: &mut Criterion) {
    let m = DispersionModel::gaussian(1.0, 3).unwrap();
    let mut g = c.benchmark_group("xi_periodized");
    for l in [3.0, 10.0] {
        g.bench_function(format!("L{l}"), |b| {
            b.iter(|| m.xi_periodized(black_box(&[0.4, -1.1, 0.7]), l).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, epsilon, periodized_xi);
criterion_main!(benches);
