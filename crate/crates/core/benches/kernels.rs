use criterion::{criterion_group, criterion_main, Criterion};

use dynatomic::budget::Budget;
use dynatomic::dynatomic::Family;
use dynatomic::monodromy::{build_graph, kneading_counts, robustness};
use dynatomic::par;

fn both<R>(c: &mut Criterion, name: &str, f: impl Fn() -> R) {
    let mut g = c.benchmark_group(name);
    g.sample_size(10);
    g.bench_function("parallel", |b| b.iter(&f));
    g.bench_function("sequential", |b| b.iter(|| par::sequential(&f)));
    g.finish();
}

fn kernels(c: &mut Criterion) {
    let budget = Budget::unlimited();
    let fam = Family::quadratic();
    both(c, "delta_nn_mod_p(6, 31)", || fam.delta_nn_mod_p(6, 31, &budget).unwrap());
    both(c, "kneading_counts(16)", || kneading_counts(16, &budget).unwrap());
    let g = build_graph(8, &budget).unwrap();
    both(c, "robustness(8, 2)", || robustness(&g, 2, &budget).unwrap());
    both(c, "discriminant_table(5)", || fam.discriminant_table(5, 1_000_000, &budget).unwrap());
}

criterion_group!(benches, kernels);
criterion_main!(benches);
