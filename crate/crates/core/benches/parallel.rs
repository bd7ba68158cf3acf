//! Sequential versus rayon execution of the hot loops.
//!
//! With `--no-default-features` both variants run on one thread and should
//! time the same.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use moment_kit::closures::ClosureModel;
use moment_kit::fp::{fp_solve, FpOptions, FpSystem};
use moment_kit::fv::{FvOptions, FvSolver};
use moment_kit::ode::OdeSystem;
use moment_kit::scenario::Scenario;
use moment_kit::Exec;

const STRATEGIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn fv_rhs(c: &mut Criterion) {
    let s = Scenario::builtin("two-beams").unwrap();
    let mut group = c.benchmark_group("fv_rhs");
    for model in ["mm1", "mk2", "m1", "pn:21"] {
        for (name, exec) in STRATEGIES {
            let opts = FvOptions { exec, ..FvOptions::new(1000) };
            let solver = FvSolver::new(model.parse::<ClosureModel>().unwrap(), &s, &opts).unwrap();
            let u = solver.initial(&s);
            let mut du = vec![0.0; u.len()];
            group.bench_with_input(BenchmarkId::new(name, model), &u, |b, u| {
                b.iter(|| solver.rhs(0.0, black_box(u), &mut du).unwrap())
            });
        }
    }
    group.finish();
}

fn fp_rhs(c: &mut Criterion) {
    let s = Scenario::builtin("one-beam").unwrap();
    let mut group = c.benchmark_group("fp_rhs");
    for (name, exec) in STRATEGIES {
        let sys = FpSystem::new(&s, 1000, 200, exec).unwrap();
        let u = sys.initial(&s);
        let mut du = vec![0.0; u.len()];
        group.bench_function(name, |b| b.iter(|| sys.rhs(0.0, black_box(&u), &mut du).unwrap()));
    }
    group.finish();
}

fn fp_short_run(c: &mut Criterion) {
    let s = Scenario::builtin("two-beams").unwrap();
    let mut group = c.benchmark_group("fp_solve");
    group.sample_size(10);
    for (name, exec) in STRATEGIES {
        let opts = FpOptions { exec, ..FpOptions::new(200, 40) };
        group.bench_function(name, |b| b.iter(|| fp_solve(&s, &opts, &[0.1]).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, fv_rhs, fp_rhs, fp_short_run);
criterion_main!(benches);
