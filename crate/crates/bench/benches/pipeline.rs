//! Benchmarks for the hot paths: the non-empty subset sampler, the exact
//! enumeration oracle, and a full scaled estimation run.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dag_reliability::bitset::BitSet;
use dag_reliability::config::Config;
use dag_reliability::exact::{exact_reliability, ExactCtx};
use dag_reliability::generate::diamond_chain;
use dag_reliability::instance::preprocess;
use dag_reliability::subset::nonempty_subset_sample;
use dag_reliability::testutil::diamond_instance;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn bench_subset_sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonempty_subset_sample");
    for n in [16usize, 256, 4096] {
        let qs = vec![0.5f64; n];
        group.bench_with_input(BenchmarkId::from_parameter(n), &qs, |b, qs| {
            let mut rng = ChaCha12Rng::seed_from_u64(1);
            b.iter(|| black_box(nonempty_subset_sample(qs, &mut rng)));
        });
    }
    group.finish();
}

fn bench_exact_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_reliability");
    for k in [2usize, 4] {
        let inst = preprocess(&diamond_chain(k, 0.5), 0.5).unwrap().ready().unwrap();
        group.bench_with_input(BenchmarkId::new("diamond_chain", k), &inst, |b, inst| {
            let ctx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
            let v = BitSet::full(inst.vertex_count());
            let e = BitSet::full(inst.edge_count());
            let l = BitSet::singleton(inst.vertex_count(), inst.s);
            b.iter(|| black_box(exact_reliability(ctx, &v, &e, &l, 24).unwrap()));
        });
    }
    group.finish();
}

fn bench_scaled_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("fpras_scaled_run");
    group.sample_size(10);
    let inst = diamond_instance(0.5);
    let cfg = Config::scaled();
    group.bench_function("diamond", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed += 1;
            black_box(dag_reliability::fpras::run(&inst, &cfg, seed))
        });
    });
    group.finish();
}

criterion_group!(benches, bench_subset_sampler, bench_exact_oracle, bench_scaled_run);
criterion_main!(benches);
