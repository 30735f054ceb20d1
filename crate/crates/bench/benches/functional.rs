use criterion::{black_box, criterion_group, criterion_main, Criterion};

use radiant_bench::{flip_cases, half_targets};
use radiant_core::functional::evaluate;

fn functional(c: &mut Criterion) {
    let mut g = c.benchmark_group("evaluate");
    for (name, surf, tau) in flip_cases() {
        let h: Vec<f64> = tau.iter().map(|t| t.sqrt()).collect();
        let kbar = half_targets(&surf);
        g.bench_function(name, |b| b.iter(|| evaluate(black_box(&surf), &h, &kbar)));
    }
    g.finish();
}

criterion_group!(benches, functional);
criterion_main!(benches);
