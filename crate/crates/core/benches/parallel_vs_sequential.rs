use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use squeezamp::metrology::{sweep, ProtocolKind, SweepAxis, SweepGrid};
use squeezamp::oracle::{qfi_pure, run_protocol_with, OracleConfig};
use squeezamp::parallel::{self, Execution};
use squeezamp::protocol::make_single_squeeze;
use squeezamp::validation::random_state;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn bench_sweep(c: &mut Criterion) {
    let grid = SweepGrid {
        protocol: ProtocolKind::Msp,
        alpha: 1.0,
        eta: 0.01,
        g_list: (0..40).map(|i| 0.1 * f64::from(i)).collect(),
        axis: SweepAxis::PhononBudget((0..50).map(|i| 10f64.powf(1.0 + 0.08 * f64::from(i))).collect()),
    };
    let mut group = c.benchmark_group("sweep");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep(black_box(&grid), exec).unwrap())
        });
    }
    group.finish();
}

fn bench_qfi(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..64).collect();
    let mut group = c.benchmark_group("random_state_qfi");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| parallel::map(exec, &seeds, |&s| qfi_pure(&random_state(40, s))))
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let p = make_single_squeeze(0.01, 1.0, 0.5, 2.0, 4.0).unwrap();
    let cfg = OracleConfig::for_protocol(&p);
    let mut group = c.benchmark_group("oracle_protocol");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_protocol_with(black_box(&p), &cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_qfi, bench_oracle);
criterion_main!(benches);
