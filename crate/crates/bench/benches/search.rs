use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use parsearch_core::search::search_cell;
use parsearch_core::seed;
use parsearch_core::{
    build_adversary_graph, compute_stats, Database, Fallback, InstanceFamily, MarkedPredicate,
    ParallelConfig, QueryLedger, StateVector, TargetSet,
};
use std::hint::black_box;

fn grover_iterate(c: &mut Criterion) {
    let mut group = c.benchmark_group("grover_iterate");
    for bits in [8u32, 12, 16] {
        let dim = 1usize << bits;
        let marked = MarkedPredicate::from_mask((0..dim).map(|i| i % 97 == 3).collect());
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &dim| {
            let mut state = StateVector::uniform(dim).unwrap();
            let mut ledger = QueryLedger::new(1);
            b.iter(|| {
                state
                    .grover_iterate(black_box(&marked), &mut ledger, 0)
                    .unwrap()
            });
        });
    }
    group.finish();
}

fn cell_search(c: &mut Criterion) {
    let targets = TargetSet::new(1000..1016).unwrap();
    let db =
        Database::with_targets(12, 13, &targets, Default::default(), &mut seed::rng(1)).unwrap();
    let cell: Vec<usize> = (0..256).collect();
    c.bench_function("search_cell/256_t16", |b| {
        let mut rng = seed::rng(2);
        b.iter(|| search_cell(&db, &cell, targets.items(), 16, Fallback::None, &mut rng).unwrap());
    });
}

fn parallel(c: &mut Criterion) {
    let mut group = c.benchmark_group("parallel_search");
    group.sample_size(20);
    for (bits, d, k) in [(12u32, 64usize, 4usize), (12, 16, 16), (14, 8, 64)] {
        let targets = TargetSet::new(1u64 << 20..(1u64 << 20) + k as u64).unwrap();
        let db = Database::with_targets(bits, 21, &targets, Default::default(), &mut seed::rng(3))
            .unwrap();
        let id = format!("n{bits}_d{d}_k{k}");
        group.bench_function(id, |b| {
            let mut s = 0;
            b.iter(|| {
                s += 1;
                parsearch_core::parallel_search(&db, d, &targets, &ParallelConfig::default(), s)
                    .unwrap()
            });
        });
    }
    group.finish();
}

fn adversary(c: &mut Criterion) {
    let family = InstanceFamily::new(3, 2, 3, 2).unwrap();
    c.bench_function("adversary/n3_m2_d3_k2", |b| {
        b.iter(|| compute_stats(&build_adversary_graph(black_box(&family)).unwrap()).unwrap());
    });
}

criterion_group!(benches, grover_iterate, cell_search, parallel, adversary);
criterion_main!(benches);
