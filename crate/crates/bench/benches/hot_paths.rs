//! Benchmarks of the four hot paths: kernel-table construction (O(p³)),
//! the charsum variety count (O(p⁵)), the counting operator (O(p³)), and
//! the two-dimensional DFT (O(p³) as implemented, row/column passes).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use corners_core::counting::corner_operator;
use corners_core::grid::{dft2, generate, Generator};
use corners_core::kernel::kernel_table;
use corners_core::ratfun::{parse_ratfun, reduce_mod_p, RatFunFp};
use corners_core::varieties::roth_count_charsum;
use std::hint::black_box;

fn pair(p: u64) -> (RatFunFp, RatFunFp) {
    (
        reduce_mod_p(&parse_ratfun("t").unwrap(), p).unwrap(),
        reduce_mod_p(&parse_ratfun("t^2").unwrap(), p).unwrap(),
    )
}

fn bench_kernel_table(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_table");
    for p in [11u64, 31, 61] {
        let (rp, rq) = pair(p);
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, _| {
            b.iter(|| kernel_table(black_box(&rp), black_box(&rq)))
        });
    }
    group.finish();
}

fn bench_charsum(c: &mut Criterion) {
    let mut group = c.benchmark_group("charsum");
    group.sample_size(10);
    for p in [7u64, 13, 19] {
        let (rp, rq) = pair(p);
        let k = kernel_table(&rp, &rq);
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, _| {
            b.iter(|| roth_count_charsum(black_box(&k)))
        });
    }
    group.finish();
}

fn bench_corner_operator(c: &mut Criterion) {
    let mut group = c.benchmark_group("corner_operator");
    for p in [11u64, 31, 61] {
        let (rp, rq) = pair(p);
        let f0 = generate(&Generator::RandomBounded, p, 1).unwrap();
        let f1 = generate(&Generator::RandomBounded, p, 2).unwrap();
        let f2 = generate(&Generator::RandomBounded, p, 3).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, _| {
            b.iter(|| {
                corner_operator(
                    black_box(&f0),
                    black_box(&f1),
                    black_box(&f2),
                    black_box(&rp),
                    black_box(&rq),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_dft2(c: &mut Criterion) {
    let mut group = c.benchmark_group("dft2");
    for p in [11u64, 31, 61] {
        let f = generate(&Generator::RandomBounded, p, 4).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, _| {
            b.iter(|| dft2(black_box(&f)))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_kernel_table,
    bench_charsum,
    bench_corner_operator,
    bench_dft2
);
criterion_main!(benches);
