//! FGSD embedding: a graph becomes the histogram of harmonic spectral
//! distances over all ordered node pairs. Node labels play no part.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDataset};
use crate::matrix::SquareMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgsdParams {
    pub bins: usize,
    pub range_max: f64,
    /// Graphs with more nodes are rejected; `None` lifts the cap.
    pub node_limit: Option<usize>,
}

impl Default for FgsdParams {
    fn default() -> Self {
        FgsdParams {
            bins: 200,
            range_max: 20.0,
            node_limit: Some(2000),
        }
    }
}

/// Per-graph histogram rows; row g sums to node_count(g)^2.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub vectors: Vec<Vec<f64>>,
    pub bins: usize,
    pub bin_width: f64,
    pub range_max: f64,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|b| b as f64 * self.bin_width).collect()
    }

    /// CSV with a header of bin lower edges, one row per graph.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("graph_index");
        for b in 0..self.bins {
            let _ = write!(out, ",bin_{:.6}", b as f64 * self.bin_width);
        }
        out.push('\n');
        for (i, row) in self.vectors.iter().enumerate() {
            let _ = write!(out, "{i}");
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Harmonic spectral distances S(x, y) for every node pair of one graph.
///
/// S(x, y) = sum over eigenpairs with lambda > 1e-8 * lambda_max of
/// (1/lambda) (phi(x) - phi(y))^2, computed from the Laplacian L = D - A.
/// The relative cutoff discards the zero eigenspace, which also covers
/// disconnected graphs.
pub fn harmonic_spectral_distances(graph: &Graph) -> SquareMatrix {
    let n = graph.node_count();
    let mut lap = SquareMatrix::zeros(n);
    for (v, d) in graph.degrees().into_iter().enumerate() {
        lap[(v, v)] = d as f64;
    }
    for &(u, v) in graph.edges() {
        lap[(u as usize, v as usize)] = -1.0;
        lap[(v as usize, u as usize)] = -1.0;
    }
    let eig = crate::eigen::symmetric_eigen(&lap);
    let lambda_max = eig.values.last().copied().unwrap_or(0.0);
    let cutoff = 1e-8 * lambda_max;
    let kept: Vec<usize> = (0..n).filter(|&k| eig.values[k] > cutoff).collect();

    // G = sum_k (1/lambda_k) phi_k phi_k^T as A A^T with A(:,k) = phi_k / sqrt(lambda_k),
    // then S(x, y) = G_xx + G_yy - 2 G_xy.
    let a = faer::Mat::from_fn(n, kept.len(), |i, col| {
        let k = kept[col];
        eig.vectors[(i, k)] / eig.values[k].sqrt()
    });
    let g = &a * a.transpose();
    SquareMatrix::from_fn(n, |x, y| {
        if x == y {
            0.0
        } else {
            g[(x, x)] + g[(y, y)] - 2.0 * g[(x, y)]
        }
    })
}

fn histogram(distances: &SquareMatrix, bins: usize, bin_width: f64) -> Vec<f64> {
    let mut row = vec![0.0; bins];
    let n = distances.size();
    for x in 0..n {
        for y in 0..n {
            // The 1e-9 nudge keeps exact bin-edge values (and their
            // eigensolver-rounded neighbors) in a deterministic bin.
            let idx = ((distances[(x, y)] / bin_width + 1e-9).floor() as i64)
                .clamp(0, bins as i64 - 1) as usize;
            row[idx] += 1.0;
        }
    }
    row
}

/// Embeds every graph of the dataset as a spectral-distance histogram.
pub fn fgsd_embed(dataset: &GraphDataset, params: &FgsdParams) -> Result<Embedding> {
    if params.bins == 0 || params.range_max <= 0.0 {
        return Err(Error::Parameter(
            "fgsd needs bins > 0 and range_max > 0".into(),
        ));
    }
    for (i, g) in dataset.graphs.iter().enumerate() {
        if g.node_count() == 0 {
            return Err(Error::Parameter(format!("graph {i} has no nodes")));
        }
        if let Some(limit) = params.node_limit {
            if g.node_count() > limit {
                return Err(Error::Parameter(format!(
                    "graph {i} has {} nodes, above the limit {limit}; lift the node limit to embed it",
                    g.node_count()
                )));
            }
        }
    }
    let bin_width = params.range_max / params.bins as f64;
    let vectors: Vec<Vec<f64>> = dataset
        .graphs
        .par_iter()
        .map(|g| histogram(&harmonic_spectral_distances(g), params.bins, bin_width))
        .collect();
    Ok(Embedding {
        vectors,
        bins: params.bins,
        bin_width,
        range_max: params.range_max,
    })
}

/// Pairwise distances between embedding rows plus the normalized similarity
/// 1 - d/max(d) (all ones when every row is identical).
pub struct EmbeddingDistance {
    pub distances: SquareMatrix,
    pub similarity: SquareMatrix,
}

pub fn embedding_distance(embedding: &Embedding) -> EmbeddingDistance {
    let n = embedding.len();
    let mut distances = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&embedding.vectors[i], &embedding.vectors[j]);
            distances[(i, j)] = d;
            distances[(j, i)] = d;
        }
    }
    let max = distances
        .as_slice()
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v));
    let similarity = if max > 0.0 {
        SquareMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { 1.0 - distances[(i, j)] / max })
    } else {
        SquareMatrix::from_fn(n, |_, _| 1.0)
    };
    EmbeddingDistance {
        distances,
        similarity,
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Cosine-normalized linear kernel of embedding rows (PSD, unit diagonal);
/// feeds the one-class SVM when it is paired with FGSD.
pub fn embedding_cosine_kernel(embedding: &Embedding) -> SquareMatrix {
    let n = embedding.len();
    let norms: Vec<f64> = embedding
        .vectors
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    SquareMatrix::from_fn(n, |i, j| {
        if i == j {
            1.0
        } else if norms[i] > 0.0 && norms[j] > 0.0 {
            embedding.vectors[i]
                .iter()
                .zip(&embedding.vectors[j])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / (norms[i] * norms[j])
        } else {
            0.0
        }
    })
}
