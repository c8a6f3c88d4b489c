use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qsamp_bench::lazy_chain;
use qsamp_core::reflect::{reflection_errors, CheckMode};
use qsamp_core::sampler::{amplitude_amplify, prepare_unknown, SamplerConfig};

fn reflection(c: &mut Criterion) {
    let chain = lazy_chain("cycle:8");
    c.bench_function("reflection_errors/cycle8", |b| b.iter(|| reflection_errors(&chain, 0.1).unwrap()));
}

fn known(c: &mut Criterion) {
    let mut group = c.benchmark_group("known");
    group.sample_size(10);
    let config = SamplerConfig { mode: CheckMode::Exact, ..SamplerConfig::default() };
    for n in [5, 8, 12] {
        let chain = lazy_chain(&format!("cycle:{n}"));
        let pig = chain.pi()[0];
        group.bench_with_input(BenchmarkId::new("cycle", n), &n, |b, _| {
            b.iter(|| amplitude_amplify(0, pig, 0.05, &chain, &config).unwrap())
        });
    }
    group.finish();
}

fn unknown(c: &mut Criterion) {
    let mut group = c.benchmark_group("unknown");
    group.sample_size(10);
    let chain = lazy_chain("cycle:8");
    let config = SamplerConfig { copies: 20, seed: 1, ..SamplerConfig::default() };
    group.bench_function("cycle8", |b| b.iter(|| prepare_unknown(&chain, Some(0), &config).unwrap()));
    group.finish();
}

criterion_group!(benches, reflection, known, unknown);
criterion_main!(benches);
