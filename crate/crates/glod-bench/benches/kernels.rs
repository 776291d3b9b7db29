use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use glod_core::{
    flip_labels, generate_k_regular, pk_kernel, wl_kernel, GraphDataset,
};

fn synthetic_dataset(graphs: usize, n: usize) -> GraphDataset {
    let mut gs = Vec::with_capacity(graphs);
    let mut classes = Vec::with_capacity(graphs);
    for s in 0..graphs as u64 {
        let k = 3 + (s % 2) as usize;
        let g = generate_k_regular(n, k, s).unwrap();
        gs.push(flip_labels(&g, (s % 4) as usize, 0, 1, s).unwrap());
        classes.push((s % 2) as u32);
    }
    GraphDataset::new("bench", gs, classes, 2).unwrap()
}

fn bench_wl(c: &mut Criterion) {
    let mut group = c.benchmark_group("wl_kernel");
    for &graphs in &[40usize, 80] {
        let ds = synthetic_dataset(graphs, 30);
        group.bench_with_input(BenchmarkId::new("L5", graphs), &ds, |b, ds| {
            b.iter(|| wl_kernel(ds, 5))
        });
    }
    group.finish();
}

fn bench_pk(c: &mut Criterion) {
    let mut group = c.benchmark_group("pk_kernel");
    for &graphs in &[40usize, 80] {
        let ds = synthetic_dataset(graphs, 30);
        group.bench_with_input(BenchmarkId::new("L5_w0.1", graphs), &ds, |b, ds| {
            b.iter(|| pk_kernel(ds, 5, 0.1, 0))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_wl, bench_pk);
criterion_main!(benches);
