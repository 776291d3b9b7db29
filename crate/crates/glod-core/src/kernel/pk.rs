//! Propagation kernel: node label distributions are diffused with the
//! row-stochastic transition matrix T = D^-1 A, then binned per iteration
//! with a 1-stable LSH hash shared by every graph in the dataset.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::graph::{Graph, GraphDataset};
use crate::kernel::{gram_matrix, KernelMatrix, SparseFeatures};
use crate::rng::seeded_rng;

/// Hash parameters: one Gaussian direction and one uniform offset per
/// iteration, fixed for the whole dataset.
#[derive(Debug, Clone)]
pub struct PkHashSpec {
    pub bin_width: f64,
    pub directions: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub seed: u64,
}

impl PkHashSpec {
    pub fn new(dim: usize, iterations: usize, bin_width: f64, seed: u64) -> PkHashSpec {
        let mut rng = seeded_rng(seed);
        let mut directions = Vec::with_capacity(iterations + 1);
        let mut offsets = Vec::with_capacity(iterations + 1);
        for _ in 0..=iterations {
            let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            directions.push(u);
            offsets.push(rng.random_range(0.0..bin_width));
        }
        PkHashSpec {
            bin_width,
            directions,
            offsets,
            seed,
        }
    }

    fn bin(&self, iteration: usize, row: &[f64]) -> i64 {
        let u = &self.directions[iteration];
        let dot: f64 = row.iter().zip(u).map(|(x, w)| x * w).sum();
        ((dot + self.offsets[iteration]) / self.bin_width).floor() as i64
    }
}

/// Dense per-node feature matrix (row-major, `node_count` x `dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFeatures {
    pub node_count: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl NodeFeatures {
    pub fn row(&self, v: usize) -> &[f64] {
        &self.data[v * self.dim..(v + 1) * self.dim]
    }
}

/// Propagates one-hot label vectors for `iterations` steps.
///
/// X_0 is the one-hot label matrix; X_{l+1} = T X_l with T = D^-1 A.
/// Isolated nodes keep their own distribution (a self-loop in T), so every
/// row of every X_l sums to 1.
pub fn pk_propagate(graph: &Graph, iterations: usize, dim: usize) -> Vec<NodeFeatures> {
    let n = graph.node_count();
    let adj = graph.adjacency();
    let mut current = vec![0.0; n * dim];
    for (v, &l) in graph.node_labels().iter().enumerate() {
        current[v * dim + l as usize] = 1.0;
    }
    let mut out = Vec::with_capacity(iterations + 1);
    out.push(NodeFeatures {
        node_count: n,
        dim,
        data: current.clone(),
    });
    for _ in 0..iterations {
        let mut next = vec![0.0; n * dim];
        for v in 0..n {
            let nbrs = &adj[v];
            let dst = &mut next[v * dim..(v + 1) * dim];
            if nbrs.is_empty() {
                dst.copy_from_slice(&current[v * dim..(v + 1) * dim]);
            } else {
                let inv = 1.0 / nbrs.len() as f64;
                for &u in nbrs {
                    let src = &current[u as usize * dim..(u as usize + 1) * dim];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s * inv;
                    }
                }
            }
        }
        out.push(NodeFeatures {
            node_count: n,
            dim,
            data: next.clone(),
        });
        current = next;
    }
    out
}

fn bin_histogram(spec: &PkHashSpec, iteration: usize, features: &NodeFeatures) -> SparseFeatures {
    let mut bins: Vec<i64> = (0..features.node_count)
        .map(|v| spec.bin(iteration, features.row(v)))
        .collect();
    bins.sort_unstable();
    let mut out: SparseFeatures = Vec::new();
    for b in bins {
        match out.last_mut() {
            Some((id, c)) if *id == b => *c += 1.0,
            _ => out.push((b, 1.0)),
        }
    }
    out
}

/// Propagation kernel over a dataset. Deterministic given `seed`; invariant
/// to node permutations (histograms forget node identity).
pub fn pk_kernel(dataset: &GraphDataset, iterations: usize, bin_width: f64, seed: u64) -> KernelMatrix {
    assert!(bin_width > 0.0, "bin width must be positive");
    let dim = dataset.label_alphabet_size;
    let spec = PkHashSpec::new(dim, iterations, bin_width, seed);
    let per_graph: Vec<Vec<SparseFeatures>> = dataset
        .graphs
        .par_iter()
        .map(|g| {
            let feats = pk_propagate(g, iterations, dim);
            (0..=iterations)
                .map(|l| bin_histogram(&spec, l, &feats[l]))
                .collect()
        })
        .collect();
    let slices = (0..=iterations)
        .map(|l| {
            let features: Vec<SparseFeatures> =
                per_graph.iter().map(|f| f[l].clone()).collect();
            gram_matrix(&features)
        })
        .collect();
    KernelMatrix::from_slices(slices)
}
