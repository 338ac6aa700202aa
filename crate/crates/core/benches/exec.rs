use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rdiv_core::{corpus_run, CheckOptions, Execution, Fan, Scalar, TDivisor};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn divisor(preset: &str, terms: &[(&str, &str)]) -> TDivisor {
    let fan = Arc::new(Fan::preset(preset).unwrap());
    let terms: Vec<(&str, Scalar)> = terms.iter().map(|(k, v)| (*k, v.parse().unwrap())).collect();
    TDivisor::from_named(&fan, &terms).unwrap()
}

fn lattice_count(c: &mut Criterion) {
    let mut g = c.benchmark_group("h0");
    let cases = [
        ("P2x60", divisor("P2", &[("r2", "60")])),
        ("F1x40", divisor("F1", &[("C", "40"), ("E", "1/2+sqrt(2)")])),
        ("P3x18", divisor("P3", &[("r3", "18")])),
    ];
    for (name, d) in &cases {
        for (mode, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(mode, name), d, |b, d| b.iter(|| black_box(d.h0_with(exec))));
        }
    }
    g.finish();
}

fn hilbert(c: &mut Criterion) {
    let mut g = c.benchmark_group("hilbert_table");
    let d = divisor("F2", &[("C", "3/2"), ("E", "sqrt(2)"), ("F", "1/3")]);
    let samples: Vec<Scalar> = (1..=24).map(Scalar::from_int).collect();
    for (mode, exec) in MODES {
        g.bench_function(mode, |b| b.iter(|| black_box(d.hilbert_table(&samples, exec).unwrap())));
    }
    g.finish();
}

fn corpus(c: &mut Criterion) {
    let mut g = c.benchmark_group("corpus");
    g.sample_size(10);
    let opts = CheckOptions::default();
    for (mode, exec) in MODES {
        g.bench_function(mode, |b| b.iter(|| black_box(corpus_run(7, 12, &opts, exec))));
    }
    g.finish();
}

criterion_group!(benches, lattice_count, hilbert, corpus);
criterion_main!(benches);
