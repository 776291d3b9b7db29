//! Weisfeiler-Leman subtree kernel.
//!
//! Each iteration re-labels every vertex with a compact id for the signature
//! (own label, sorted neighbor labels). The id table is shared across the
//! whole dataset and grows in first-encounter order (graphs in dataset
//! order, nodes in index order), so count vectors of different graphs live
//! in the same feature space.

use std::collections::HashMap;

use crate::graph::GraphDataset;
use crate::kernel::{gram_matrix, KernelMatrix, SparseFeatures};

/// Per-iteration signature-to-id tables. Iteration l >= 1 maps
/// (previous label of v, ascending labels of v's neighbors) to a dense id.
#[derive(Debug, Clone, Default)]
pub struct WlLabelTable {
    pub per_iteration: Vec<HashMap<(u32, Vec<u32>), u32>>,
}

/// Output of the relabeling pass: `labels[l][g][v]` is the label of node v
/// of graph g at iteration l.
#[derive(Debug, Clone)]
pub struct WlRelabeling {
    pub labels: Vec<Vec<Vec<u32>>>,
    pub alphabet_sizes: Vec<usize>,
    pub table: WlLabelTable,
}

pub fn wl_relabel(dataset: &GraphDataset, iterations: usize) -> WlRelabeling {
    let adjacency: Vec<Vec<Vec<u32>>> = dataset.graphs.iter().map(|g| g.adjacency()).collect();
    let mut labels: Vec<Vec<Vec<u32>>> = Vec::with_capacity(iterations + 1);
    labels.push(
        dataset
            .graphs
            .iter()
            .map(|g| g.node_labels().to_vec())
            .collect(),
    );
    let mut alphabet_sizes = vec![dataset.label_alphabet_size];
    let mut table = WlLabelTable::default();

    for _ in 1..=iterations {
        let prev = labels.last().expect("iteration 0 present");
        let mut map: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
        let mut next: Vec<Vec<u32>> = Vec::with_capacity(dataset.len());
        for (g, adj) in adjacency.iter().enumerate() {
            let prev_g = &prev[g];
            let mut relabeled = Vec::with_capacity(prev_g.len());
            for (v, nbrs) in adj.iter().enumerate() {
                let mut nbr_labels: Vec<u32> =
                    nbrs.iter().map(|&u| prev_g[u as usize]).collect();
                nbr_labels.sort_unstable();
                let next_id = map.len() as u32;
                let id = *map.entry((prev_g[v], nbr_labels)).or_insert(next_id);
                relabeled.push(id);
            }
            next.push(relabeled);
        }
        alphabet_sizes.push(map.len());
        table.per_iteration.push(map);
        labels.push(next);
    }

    WlRelabeling {
        labels,
        alphabet_sizes,
        table,
    }
}

fn count_features(node_labels: &[u32]) -> SparseFeatures {
    let mut sorted: Vec<u32> = node_labels.to_vec();
    sorted.sort_unstable();
    let mut out: SparseFeatures = Vec::new();
    for &l in &sorted {
        match out.last_mut() {
            Some((id, c)) if *id == l as i64 => *c += 1.0,
            _ => out.push((l as i64, 1.0)),
        }
    }
    out
}

/// WL subtree kernel: per_iteration[l](i, j) is the dot product of the
/// label-count vectors of graphs i and j at iteration l.
pub fn wl_kernel(dataset: &GraphDataset, iterations: usize) -> KernelMatrix {
    let relabeling = wl_relabel(dataset, iterations);
    let slices = relabeling
        .labels
        .iter()
        .map(|per_graph| {
            let features: Vec<SparseFeatures> =
                per_graph.iter().map(|ls| count_features(ls)).collect();
            gram_matrix(&features)
        })
        .collect();
    KernelMatrix::from_slices(slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn dataset(graphs: Vec<Graph>, alphabet: usize) -> GraphDataset {
        let n = graphs.len();
        GraphDataset::new("t", graphs, vec![0; n], alphabet).unwrap()
    }

    #[test]
    fn single_edge_same_labels_stays_uniform() {
        let g = Graph::new(2, vec![(0, 1)], vec![0, 0]).unwrap();
        let ds = dataset(vec![g], 1);
        let r = wl_relabel(&ds, 3);
        for l in 0..=3 {
            assert_eq!(r.labels[l][0][0], r.labels[l][0][1]);
        }
    }

    #[test]
    fn path_of_three_splits_ends_from_middle() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)], vec![0, 0, 0]).unwrap();
        let ds = dataset(vec![g], 1);
        let r = wl_relabel(&ds, 1);
        let it1 = &r.labels[1][0];
        // endpoints see one neighbor, the middle sees two
        assert_eq!(it1[0], it1[2]);
        assert_ne!(it1[0], it1[1]);
        assert_eq!(r.alphabet_sizes[1], 2);
    }

    #[test]
    fn label_histograms_differ_after_flip() {
        let a = crate::graph::generate_k_regular(10, 3, 1).unwrap();
        let b = crate::graph::flip_labels(&a, 1, 0, 1, 2).unwrap();
        let ds = GraphDataset::new("p", vec![a, b], vec![0, 0], 2).unwrap();
        let r = wl_relabel(&ds, 3);
        for l in 0..=3 {
            let mut ca = r.labels[l][0].clone();
            let mut cb = r.labels[l][1].clone();
            ca.sort_unstable();
            cb.sort_unstable();
            assert_ne!(ca, cb, "iteration {l}");
        }
    }

    #[test]
    fn identical_graphs_have_unit_similarity() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)], vec![0, 1, 0]).unwrap();
        let ds = dataset(vec![g.clone(), g], 2);
        let km = wl_kernel(&ds, 4);
        assert!((km.normalized_cumulative()[(0, 1)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_alphabets_have_zero_similarity() {
        let a = Graph::new(2, vec![(0, 1)], vec![0, 0]).unwrap();
        let b = Graph::new(2, vec![(0, 1)], vec![1, 1]).unwrap();
        let ds = dataset(vec![a, b], 2);
        let km = wl_kernel(&ds, 3);
        for l in 0..=3 {
            assert_eq!(km.per_iteration(l)[(0, 1)], 0.0);
        }
        assert_eq!(km.normalized_cumulative()[(0, 1)], 0.0);
    }

    #[test]
    fn node_order_does_not_matter() {
        let g = Graph::new(4, vec![(0, 1), (1, 2), (2, 3)], vec![0, 1, 1, 0]).unwrap();
        let perm = g.permuted(&[2, 0, 3, 1]).unwrap();
        let ds = dataset(vec![g, perm], 2);
        let km = wl_kernel(&ds, 5);
        assert!((km.normalized_cumulative()[(0, 1)] - 1.0).abs() < 1e-12);
    }
}
