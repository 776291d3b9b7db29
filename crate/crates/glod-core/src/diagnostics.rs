//! Embedding-space measurements behind the density-disparity and
//! overlapping-support analysis: NN-Radius, NN-Disagreement%, classical MDS
//! and the per-iteration diagnostic bundle.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fgsd::{embedding_distance, fgsd_embed, FgsdParams};
use crate::graph::GraphDataset;
use crate::kernel::{pk_kernel, wl_kernel};
use crate::matrix::SquareMatrix;

/// Distance to the k-th nearest neighbor, with distance = 1 - similarity.
pub fn nn_radius(similarity: &SquareMatrix, k: usize) -> Result<Vec<f64>> {
    let n = similarity.size();
    if k == 0 || n <= k {
        return Err(Error::Parameter(format!(
            "nn_radius needs 1 <= k < N, got N={n} k={k}"
        )));
    }
    Ok((0..n)
        .map(|i| {
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| 1.0 - similarity[(i, j)])
                .collect();
            dists.sort_by(f64::total_cmp);
            dists[k - 1]
        })
        .collect())
}

/// Fraction of opposite-group points within (and at) each point's NN-Radius.
pub fn nn_disagreement(similarity: &SquareMatrix, labels: &[u32], k: usize) -> Result<Vec<f64>> {
    let n = similarity.size();
    if labels.len() != n {
        return Err(Error::Parameter("labels length mismatch".into()));
    }
    let radius = nn_radius(similarity, k)?;
    Ok((0..n)
        .map(|i| {
            let mut total = 0usize;
            let mut opposite = 0usize;
            for j in 0..n {
                if j == i {
                    continue;
                }
                if 1.0 - similarity[(i, j)] <= radius[i] {
                    total += 1;
                    if labels[j] != labels[i] {
                        opposite += 1;
                    }
                }
            }
            opposite as f64 / total as f64
        })
        .collect())
}

/// 2-D classical (Torgerson) scaling output.
#[derive(Debug, Clone)]
pub struct MdsResult {
    pub coordinates: Vec<[f64; 2]>,
    /// The two largest eigenvalues of the double-centered matrix.
    pub eigenvalues: [f64; 2],
    /// Count of negative eigenvalues clamped to zero among the top 2.
    pub clamped: usize,
}

/// Torgerson scaling: B = -1/2 J D^2 J, top-2 eigenpairs, coordinates
/// scaled by sqrt(max(lambda, 0)). Each eigenvector's first nonzero entry
/// is made positive so output is deterministic.
pub fn classical_mds(distances: &SquareMatrix) -> MdsResult {
    let n = distances.size();
    let mut b = SquareMatrix::from_fn(n, |i, j| {
        let d = distances[(i, j)];
        -0.5 * d * d
    });
    let row_means: Vec<f64> = (0..n).map(|i| b.row(i).iter().sum::<f64>() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    // symmetric input, so column means equal row means
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] += grand - row_means[i] - row_means[j];
        }
    }
    let eig = crate::eigen::symmetric_eigen(&b);
    let mut coordinates = vec![[0.0; 2]; n];
    let mut eigenvalues = [0.0; 2];
    let mut clamped = 0;
    for axis in 0..2usize {
        if n < axis + 1 {
            break;
        }
        let col = n - 1 - axis;
        let lambda = eig.values[col];
        eigenvalues[axis] = lambda;
        let scale = lambda.max(0.0).sqrt();
        if lambda < 0.0 {
            clamped += 1;
        }
        let mut sign = 1.0;
        for i in 0..n {
            let v = eig.vectors[(i, col)];
            if v.abs() > 1e-12 {
                sign = v.signum();
                break;
            }
        }
        for i in 0..n {
            coordinates[i][axis] = eig.vectors[(i, col)] * sign * scale;
        }
    }
    MdsResult {
        coordinates,
        eigenvalues,
        clamped,
    }
}

/// Histogram over [0, 1] with equal-width bins; values at 1.0 land in the
/// last bin.
pub fn unit_histogram(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = ((v * bins as f64).floor() as i64).clamp(0, bins as i64 - 1) as usize;
        counts[idx] += 1;
    }
    counts
}

/// Similarity source for a diagnostic report.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticMethod {
    Wl,
    Pk { bin_width: f64, seed: u64 },
    Fgsd { params: FgsdParams },
}

impl DiagnosticMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            DiagnosticMethod::Wl => "wl",
            DiagnosticMethod::Pk { .. } => "pk",
            DiagnosticMethod::Fgsd { .. } => "fgsd",
        }
    }
}

/// All four measurement panels at one iteration.
#[derive(Debug, Clone)]
pub struct IterationDiagnostic {
    pub iteration: usize,
    pub similarity: SquareMatrix,
    pub mds: MdsResult,
    pub radius: Vec<f64>,
    pub disagreement: Vec<f64>,
    pub radius_histograms: Vec<(u32, Vec<usize>)>,
    pub disagreement_histograms: Vec<(u32, Vec<usize>)>,
}

#[derive(Debug, Clone)]
pub struct DiagnosticReport {
    pub dataset: String,
    pub method: String,
    pub neighbors: usize,
    /// True when slices are cumulative sums through each iteration instead
    /// of single-iteration kernels.
    pub cumulative_slices: bool,
    pub grouping: Vec<u32>,
    pub iterations: Vec<IterationDiagnostic>,
}

pub const HISTOGRAM_BINS: usize = 20;

/// Computes similarity, MDS, NN-Radius and NN-Disagreement panels for each
/// requested iteration. `grouping` is typically the class labels (full
/// data) or inlier/outlier flags (a down-sampled variant).
pub fn full_diagnostic(
    dataset: &GraphDataset,
    method: &DiagnosticMethod,
    iterations: &[usize],
    grouping: &[u32],
    neighbors: usize,
    cumulative_slices: bool,
) -> Result<DiagnosticReport> {
    if grouping.len() != dataset.len() {
        return Err(Error::Parameter(
            "grouping length does not match dataset size".into(),
        ));
    }
    if dataset.len() <= neighbors {
        return Err(Error::Parameter(format!(
            "diagnostics need more graphs than neighbors, got N={} k={neighbors}",
            dataset.len()
        )));
    }
    let groups: Vec<u32> = {
        let mut g = grouping.to_vec();
        g.sort_unstable();
        g.dedup();
        g
    };

    let slices: Vec<(usize, SquareMatrix)> = match method {
        DiagnosticMethod::Wl | DiagnosticMethod::Pk { .. } => {
            let max_l = *iterations
                .iter()
                .max()
                .ok_or_else(|| Error::Parameter("empty iteration list".into()))?;
            let km = match method {
                DiagnosticMethod::Wl => wl_kernel(dataset, max_l),
                DiagnosticMethod::Pk { bin_width, seed } => {
                    pk_kernel(dataset, max_l, *bin_width, *seed)
                }
                DiagnosticMethod::Fgsd { .. } => unreachable!(),
            };
            iterations
                .iter()
                .map(|&l| {
                    let sim = if cumulative_slices {
                        km.normalized_cumulative_through(l)
                    } else {
                        km.normalized_per_iteration(l).clone()
                    };
                    (l, sim)
                })
                .collect()
        }
        DiagnosticMethod::Fgsd { params } => {
            let emb = fgsd_embed(dataset, params)?;
            vec![(0, embedding_distance(&emb).similarity)]
        }
    };

    let mut out = Vec::with_capacity(slices.len());
    for (l, sim) in slices {
        let radius = nn_radius(&sim, neighbors)?;
        let disagreement = nn_disagreement(&sim, grouping, neighbors)?;
        let distance = crate::kernel::similarity_to_distance(&sim);
        let mds = classical_mds(&distance);
        let per_group = |values: &[f64]| -> Vec<(u32, Vec<usize>)> {
            groups
                .iter()
                .map(|&g| {
                    let vals: Vec<f64> = values
                        .iter()
                        .zip(grouping)
                        .filter(|(_, &gg)| gg == g)
                        .map(|(v, _)| *v)
                        .collect();
                    (g, unit_histogram(&vals, HISTOGRAM_BINS))
                })
                .collect()
        };
        out.push(IterationDiagnostic {
            iteration: l,
            radius_histograms: per_group(&radius),
            disagreement_histograms: per_group(&disagreement),
            similarity: sim,
            mds,
            radius,
            disagreement,
        });
    }

    Ok(DiagnosticReport {
        dataset: dataset.name.clone(),
        method: method.tag().to_string(),
        neighbors,
        cumulative_slices,
        grouping: grouping.to_vec(),
        iterations: out,
    })
}

impl DiagnosticReport {
    /// Writes `similarity_L{l}.csv`, `mds_L{l}.csv`, `radius_L{l}.csv`,
    /// `disagreement_L{l}.csv` per iteration plus `manifest.json`; returns
    /// the file names written.
    pub fn write_csv_bundle(&self, dir: &Path) -> Result<Vec<String>> {
        std::fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for it in &self.iterations {
            let l = it.iteration;

            let sim_name = format!("similarity_L{l}.csv");
            crate::io::write_atomic(&dir.join(&sim_name), it.similarity.to_csv().as_bytes())?;
            files.push(sim_name);

            let mut mds = String::from("index,x,y,group\n");
            for (i, c) in it.mds.coordinates.iter().enumerate() {
                let _ = writeln!(mds, "{i},{:.8e},{:.8e},{}", c[0], c[1], self.grouping[i]);
            }
            let mds_name = format!("mds_L{l}.csv");
            crate::io::write_atomic(&dir.join(&mds_name), mds.as_bytes())?;
            files.push(mds_name);

            let column = |name: &str, values: &[f64]| -> String {
                let mut s = format!("index,{name},group\n");
                for (i, v) in values.iter().enumerate() {
                    let _ = writeln!(s, "{i},{v:.8e},{}", self.grouping[i]);
                }
                s
            };
            let radius_name = format!("radius_L{l}.csv");
            crate::io::write_atomic(&dir.join(&radius_name), column("radius", &it.radius).as_bytes())?;
            files.push(radius_name);

            let dis_name = format!("disagreement_L{l}.csv");
            crate::io::write_atomic(
                &dir.join(&dis_name),
                column("disagreement", &it.disagreement).as_bytes(),
            )?;
            files.push(dis_name);
        }
        Ok(files)
    }
}
