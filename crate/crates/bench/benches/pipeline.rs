use criterion::{criterion_group, criterion_main, Criterion};
use num::BigRational;
use std::hint::black_box;
use tilingforge_core::fixtures;
use tilingforge_core::geometry::maximize_a;
use tilingforge_core::kasteleyn::{
    enumerate_matchings, kasteleyn_matrix, kasteleyn_signs, laurent_det,
};
use tilingforge_core::map::{homology_weights, quiver_to_map};
use tilingforge_core::plethystics::{pe, pl, series_from_rational};
use tilingforge_core::poly::{canonical_polygon, toric_diagram};

fn bench_kasteleyn(c: &mut Criterion) {
    let f = fixtures::dp3();
    let m = f.map().unwrap();
    let weights = f.pinned_weights().unwrap();
    let signs = f.pinned_signs().unwrap();
    c.bench_function("dp3 kasteleyn determinant", |b| {
        b.iter(|| {
            let k = kasteleyn_matrix(&m, &signs, &weights).unwrap();
            black_box(laurent_det(&k))
        })
    });
    c.bench_function("dp3 matching enumeration", |b| {
        b.iter(|| black_box(enumerate_matchings(&m, &weights, None).unwrap().len()))
    });
    let det = laurent_det(&kasteleyn_matrix(&m, &signs, &weights).unwrap());
    let diagram = toric_diagram(&det).unwrap();
    c.bench_function("dp3 canonical polygon", |b| {
        b.iter(|| black_box(canonical_polygon(&diagram)))
    });
}

fn bench_homology(c: &mut Criterion) {
    let m = quiver_to_map(&fixtures::f0_phase2()).unwrap();
    c.bench_function("f0-II homology weights", |b| {
        b.iter(|| black_box(homology_weights(&m).unwrap().weights))
    });
    c.bench_function("f0-II sign solve", |b| {
        b.iter(|| black_box(kasteleyn_signs(&m).unwrap()))
    });
}

fn bench_a_maximization(c: &mut Criterion) {
    let m = quiver_to_map(&fixtures::f0_phase2()).unwrap();
    let mut group = c.benchmark_group("a-maximization");
    group.sample_size(20);
    group.bench_function("f0-II 32 restarts", |b| {
        b.iter(|| black_box(maximize_a(&m).unwrap().objective))
    });
    group.finish();
}

fn bench_plethystics(c: &mut Criterion) {
    let ints = |v: &[i64]| -> Vec<BigRational> {
        v.iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect()
    };
    let hilbert = series_from_rational(&ints(&[1, 0, -1]), &ints(&[1, -4, 6, -4, 1]), 30).unwrap();
    c.bench_function("plethystic log at order 30", |b| {
        b.iter(|| black_box(pl(&hilbert).unwrap()))
    });
    let f = pl(&hilbert).unwrap();
    c.bench_function("plethystic exp at order 30", |b| {
        b.iter(|| black_box(pe(&f)))
    });
}

criterion_group!(
    benches,
    bench_kasteleyn,
    bench_homology,
    bench_a_maximization,
    bench_plethystics
);
criterion_main!(benches);
