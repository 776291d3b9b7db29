//! Graph kernels producing per-iteration and cumulative similarity matrices.

pub mod pk;
pub mod wl;

use rayon::prelude::*;

use crate::matrix::SquareMatrix;

pub use pk::{pk_kernel, pk_propagate, PkHashSpec};
pub use wl::{wl_kernel, wl_relabel, WlLabelTable, WlRelabeling};

/// Sparse feature vector: (feature id, count), sorted by id.
pub type SparseFeatures = Vec<(i64, f64)>;

fn sparse_dot(a: &[(i64, f64)], b: &[(i64, f64)]) -> f64 {
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                sum += a[i].1 * b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    sum
}

/// Gram matrix of sparse feature vectors. Entries are computed
/// independently, so the result is identical for any worker count.
pub(crate) fn gram_matrix(features: &[SparseFeatures]) -> SquareMatrix {
    let n = features.len();
    let mut upper: Vec<Vec<f64>> = Vec::with_capacity(n);
    (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| sparse_dot(&features[i], &features[j]))
                .collect::<Vec<f64>>()
        })
        .collect_into_vec(&mut upper);
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for (off, &v) in upper[i].iter().enumerate() {
            let j = i + off;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Divides entry (i, j) by sqrt(k_ii * k_jj). The diagonal becomes exactly 1
/// where it was nonzero; rows with a zero diagonal become all-zero.
pub(crate) fn normalize_by_diagonal(raw: &SquareMatrix) -> SquareMatrix {
    let n = raw.size();
    let mut out = SquareMatrix::zeros(n);
    let diag: Vec<f64> = (0..n).map(|i| raw[(i, i)]).collect();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                out[(i, j)] = if diag[i] > 0.0 { 1.0 } else { 0.0 };
            } else if diag[i] > 0.0 && diag[j] > 0.0 {
                out[(i, j)] = raw[(i, j)] / (diag[i] * diag[j]).sqrt();
            }
        }
    }
    out
}

/// Per-iteration and cumulative similarity matrices of a kernel over a
/// dataset. `per_iteration[l]` holds the unnormalized dot products at
/// iteration l; `cumulative` is their element-wise sum over l = 0..=L.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    per_iteration: Vec<SquareMatrix>,
    cumulative: SquareMatrix,
    normalized_cumulative: SquareMatrix,
    normalized_per_iteration: Vec<SquareMatrix>,
}

impl KernelMatrix {
    pub fn from_slices(per_iteration: Vec<SquareMatrix>) -> KernelMatrix {
        assert!(!per_iteration.is_empty(), "need at least iteration 0");
        let n = per_iteration[0].size();
        let mut cumulative = SquareMatrix::zeros(n);
        for slice in &per_iteration {
            assert_eq!(slice.size(), n);
            for (c, s) in cumulative.as_mut_slice().iter_mut().zip(slice.as_slice()) {
                *c += s;
            }
        }
        let normalized_cumulative = normalize_by_diagonal(&cumulative);
        let normalized_per_iteration = per_iteration.iter().map(normalize_by_diagonal).collect();
        KernelMatrix {
            per_iteration,
            cumulative,
            normalized_cumulative,
            normalized_per_iteration,
        }
    }

    pub fn size(&self) -> usize {
        self.cumulative.size()
    }

    /// Highest iteration index L (there are L+1 slices).
    pub fn max_iteration(&self) -> usize {
        self.per_iteration.len() - 1
    }

    pub fn per_iteration(&self, l: usize) -> &SquareMatrix {
        &self.per_iteration[l]
    }

    pub fn cumulative(&self) -> &SquareMatrix {
        &self.cumulative
    }

    pub fn normalized_cumulative(&self) -> &SquareMatrix {
        &self.normalized_cumulative
    }

    pub fn normalized_per_iteration(&self, l: usize) -> &SquareMatrix {
        &self.normalized_per_iteration[l]
    }

    /// Normalized sum of iterations 0..=l (the cumulative kernel a run with
    /// max iteration l would produce).
    pub fn normalized_cumulative_through(&self, l: usize) -> SquareMatrix {
        let n = self.size();
        let mut sum = SquareMatrix::zeros(n);
        for slice in &self.per_iteration[..=l] {
            for (c, s) in sum.as_mut_slice().iter_mut().zip(slice.as_slice()) {
                *c += s;
            }
        }
        normalize_by_diagonal(&sum)
    }

    /// Restriction to the given graph indices (raw slices are sliced and
    /// re-normalized, which equals recomputing on the subset).
    pub fn submatrix(&self, idx: &[usize]) -> KernelMatrix {
        KernelMatrix::from_slices(
            self.per_iteration
                .iter()
                .map(|s| s.submatrix(idx))
                .collect(),
        )
    }
}

/// Kernel distance 1 - normalized cumulative similarity, clamped to [0, 1],
/// zero diagonal.
pub fn kernel_distance(matrix: &KernelMatrix) -> SquareMatrix {
    similarity_to_distance(matrix.normalized_cumulative())
}

pub(crate) fn similarity_to_distance(sim: &SquareMatrix) -> SquareMatrix {
    let n = sim.size();
    let mut d = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = (1.0 - sim[(i, j)]).clamp(0.0, 1.0);
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_dot_merges_by_id() {
        let a = vec![(0, 2.0), (3, 1.0), (7, 4.0)];
        let b = vec![(1, 5.0), (3, 2.0), (7, 0.5)];
        assert_eq!(sparse_dot(&a, &b), 4.0);
    }

    #[test]
    fn normalization_unit_diagonal() {
        let raw = SquareMatrix::from_rows(vec![vec![4.0, 2.0], vec![2.0, 9.0]]);
        let norm = normalize_by_diagonal(&raw);
        assert_eq!(norm[(0, 0)], 1.0);
        assert_eq!(norm[(1, 1)], 1.0);
        assert!((norm[(0, 1)] - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zero_diagonal_rows_become_zero() {
        let raw = SquareMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 4.0]]);
        let norm = normalize_by_diagonal(&raw);
        assert_eq!(norm[(0, 0)], 0.0);
        assert_eq!(norm[(0, 1)], 0.0);
        assert_eq!(norm[(1, 1)], 1.0);
    }

    #[test]
    fn distance_is_symmetric_zero_diagonal() {
        let slices = vec![SquareMatrix::from_rows(vec![
            vec![2.0, 1.0],
            vec![1.0, 2.0],
        ])];
        let km = KernelMatrix::from_slices(slices);
        let d = kernel_distance(&km);
        assert_eq!(d[(0, 0)], 0.0);
        assert_eq!(d[(0, 1)], d[(1, 0)]);
        assert!((d[(0, 1)] - 0.5).abs() < 1e-15);
    }
}
