//! Sequential vs data-parallel study sweeps.
//!
//! Each sweep runs independent `(N, mode)` jobs; the parallel variant only
//! helps with more than one core and when built with the `parallel` feature.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use degpar::harness::{parse_config, run_study, ExperimentConfig};
use degpar::parallel::Execution;

fn sweeps() -> Vec<(&'static str, ExperimentConfig)> {
    let cfg = |text: &str| parse_config(text, "bench").unwrap();
    vec![
        (
            "porous-iterations",
            cfg("study = \"porous-iterations\"\nn = [32, 64, 128, 256]\n[porous]\nelapsed = 0.25\n"),
        ),
        (
            "sulfation-iterations",
            cfg("study = \"sulfation-iterations\"\nn = [32, 64, 128]\n[sulfation]\nelapsed = 0.25\n"),
        ),
    ]
}

fn bench_sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, base) in sweeps() {
        for execution in [Execution::Sequential, Execution::Parallel] {
            let mut cfg = base.clone();
            cfg.execution = execution;
            group.bench_with_input(
                BenchmarkId::new(name, format!("{execution:?}")),
                &cfg,
                |b, cfg| b.iter(|| run_study(cfg).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_sweeps);
criterion_main!(benches);
