use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracweyl::eigen::{first_eigenpair, SolverConfig};
use fracweyl::energy::AssemblyOptions;
use fracweyl::mesh::complement_potential_with;
use fracweyl::{build_grid, DomainSpec, Execution, FracParams, NonlocalEnergy};

const MODES: [(&str, Execution); 2] = [
    ("serial", Execution::Serial),
    ("parallel", Execution::Parallel),
];

fn kappa(c: &mut Criterion) {
    let params = FracParams::new(0.5, 2.0, 2).unwrap();
    let grid = build_grid(&DomainSpec::unit_cube(2), params, 24).unwrap();
    let mut group = c.benchmark_group("complement_potential");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, grid.len()), |b| {
            b.iter(|| {
                complement_potential_with(black_box(&grid), Default::default(), exec).unwrap()
            })
        });
    }
    group.finish();
}

fn gradient(c: &mut Criterion) {
    let params = FracParams::new(0.5, 3.0, 2).unwrap();
    let grid = build_grid(&DomainSpec::unit_cube(2), params, 40).unwrap();
    let mut group = c.benchmark_group("gradient");
    for (name, exec) in MODES {
        let opts = AssemblyOptions {
            execution: exec,
            ..Default::default()
        };
        let energy = NonlocalEnergy::assemble_with(&grid, opts).unwrap();
        let u: Vec<f64> = (0..energy.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        group.bench_function(BenchmarkId::new(name, grid.len()), |b| {
            b.iter(|| energy.gradient(black_box(&u)).unwrap())
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let params = FracParams::new(0.5, 2.5, 1).unwrap();
    let grid = build_grid(&DomainSpec::interval(0.0, 1.0), params, 128).unwrap();
    let cfg = SolverConfig::default();
    let mut group = c.benchmark_group("first_eigenpair");
    group.sample_size(10);
    for (name, exec) in MODES {
        let energy = NonlocalEnergy::assemble(&grid).with_execution(exec);
        group.bench_function(BenchmarkId::new(name, grid.len()), |b| {
            b.iter(|| first_eigenpair(black_box(&energy), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kappa, gradient, solve);
criterion_main!(benches);
