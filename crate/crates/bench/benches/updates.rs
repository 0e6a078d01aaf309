use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use dynlis::decremental::DecrementalLis;
use dynlis::dynamic::DynamicLis;
use dynlis::om::OrderMaintenance;
use dynlis::{lis_static, normalize, PointSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shuffled(n: usize, seed: u64) -> Vec<i64> {
    let mut v: Vec<i64> = (0..n as i64).collect();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    v
}

fn static_lis(c: &mut Criterion) {
    let mut g = c.benchmark_group("lis_static");
    for n in [1_000usize, 100_000] {
        let ps = normalize(&shuffled(n, 1));
        g.bench_with_input(BenchmarkId::from_parameter(n), &ps, |b, ps| b.iter(|| lis_static(black_box(ps.points()))));
    }
    g.finish();
}

fn order_maintenance(c: &mut Criterion) {
    c.bench_function("om_insert_10k_at_front", |b| {
        b.iter(|| {
            let mut om = OrderMaintenance::new();
            for _ in 0..10_000 {
                om.insert_after(OrderMaintenance::MIN).unwrap();
            }
            om
        })
    });
}

fn dynamic_updates(c: &mut Criterion) {
    let mut g = c.benchmark_group("dynamic_delete_insert");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for n in [256usize, 1024] {
        let mut d = DynamicLis::from_values(&shuffled(n, 2), 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| {
                let i = rng.gen_range(0..d.len());
                d.delete(i).unwrap();
                d.insert(rng.gen_range(0..=d.len()), rng.gen_range(0..n as i64)).unwrap();
            })
        });
    }
    g.finish();
}

fn dynamic_queries(c: &mut Criterion) {
    let mut g = c.benchmark_group("dynamic_query");
    for n in [256usize, 1024] {
        let d = DynamicLis::from_values(&shuffled(n, 4), 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(i..n);
                d.query(i, j).unwrap()
            })
        });
    }
    g.finish();
}

fn decremental_deletes(c: &mut Criterion) {
    let mut g = c.benchmark_group("decremental_delete");
    g.sample_size(10);
    for n in [256usize, 1024] {
        let ys: Vec<u32> = shuffled(n, 6).into_iter().map(|v| v as u32).collect();
        let base = DecrementalLis::build(&PointSet::from_ranks(&ys).unwrap(), 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter_batched(
                || (base.clone(), rng.gen_range(0..n)),
                |(mut d, i)| {
                    d.delete(i).unwrap();
                    d
                },
                BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

criterion_group!(benches, static_lis, order_maintenance, dynamic_updates, dynamic_queries, decremental_deletes);
criterion_main!(benches);
