//! Sequential versus rayon-parallel differential checking of the random
//! corpus.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cm2cypher::verify::{verify_sequential, VerifyConfig, DEFAULT_GENERATOR};

fn corpus(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for count in [50, 200] {
        let config = VerifyConfig { count, ..VerifyConfig::default() };
        group.bench_with_input(BenchmarkId::new("sequential", count), &config, |b, config| {
            b.iter(|| verify_sequential(config, DEFAULT_GENERATOR))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", count), &config, |b, config| {
            b.iter(|| cm2cypher::verify::verify_parallel(config, DEFAULT_GENERATOR))
        });
    }
    group.finish();
}

criterion_group!(benches, corpus);
criterion_main!(benches);
