use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fracws::numerov::{find_ws_spectrum, RadialGrid};
use fracws::spectrum::{enumerate_solutions, nuclear_params, solve_level, NUCLEON_MASS};
use fracws::{Execution, FractionalOrder, SolveOptions, WellShape};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn opts(exec: Execution) -> SolveOptions {
    SolveOptions {
        exec,
        ..SolveOptions::default()
    }
}

fn root_scan(c: &mut Criterion) {
    let shape = WellShape::new(25.0, 0.0, 1.0).unwrap();
    let fo = FractionalOrder::new(0.9, 0.95).unwrap();
    let mut g = c.benchmark_group("solve_level");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| solve_level(black_box(2), &shape, &fo, &opts(exec)).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("enumerate_solutions");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| enumerate_solutions(&shape, &fo, black_box(6), &opts(exec)).unwrap())
        });
    }
    g.finish();
}

fn shooting(c: &mut Criterion) {
    let pp = nuclear_params(56.0, 1.285, 0.65, 10.0, NUCLEON_MASS).unwrap();
    let grid = RadialGrid::default();
    let mut g = c.benchmark_group("find_ws_spectrum");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| find_ws_spectrum(&pp, &grid, black_box(10), exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, root_scan, shooting);
criterion_main!(benches);
