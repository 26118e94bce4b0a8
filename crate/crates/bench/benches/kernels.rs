use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use charbiset::biset::restrict::restrict_left;
use charbiset::biset::stability::f_graph_classes;
use charbiset::biset::{brute_force_fixed_points, canonical, count_fixed_points};
use charbiset::idempotent::omega_solve;
use charbiset::realization::realization_report;
use charbiset::solver::{minimal_biset, ClassTable};
use charbiset_bench::{minimal, system, table};

fn fixed_points(c: &mut Criterion) {
    let fs = system("rv96");
    let g = fs.group();
    let classes = f_graph_classes(&fs);
    let a = &classes[classes.len() / 2].morphism;
    let b = &classes[classes.len() / 3].morphism;
    c.bench_function("count_fixed_points p=7", |bench| bench.iter(|| count_fixed_points(g, a, b)));
    c.bench_function("brute_force_fixed_points p=7", |bench| bench.iter(|| brute_force_fixed_points(g, a, b)));
    let phi = fs.phi(0, 1, 1, 2).unwrap();
    c.bench_function("canonical key V_i p=7", |bench| bench.iter(|| canonical(g, &phi)));
}

fn solver(c: &mut Criterion) {
    let fs = system("th4s4");
    c.bench_function("class table p=5", |bench| {
        bench.iter_batched(|| fs.clone(), |fs| ClassTable::new(fs).unwrap(), BatchSize::SmallInput)
    });
    let t = table("d8");
    c.bench_function("minimal biset d8", |bench| bench.iter(|| minimal_biset(&t).unwrap()));
    c.bench_function("idempotent solve d8", |bench| bench.iter(|| omega_solve(&t).unwrap()));
}

fn realization(c: &mut Criterion) {
    let (fs, x) = minimal("sd16");
    let alpha = fs.out_autos()[1].clone();
    c.bench_function("restrict_left sd16", |bench| bench.iter(|| restrict_left(&x, &alpha)));
    let mut group = c.benchmark_group("realization");
    group.sample_size(10);
    group.bench_function("sd16", |bench| bench.iter(|| realization_report(&fs, &x).unwrap()));
    group.finish();
}

criterion_group!(benches, fixed_points, solver, realization);
criterion_main!(benches);
