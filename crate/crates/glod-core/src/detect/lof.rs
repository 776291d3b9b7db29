//! Local Outlier Factor over a precomputed distance matrix.
//!
//! Follows Breunig et al.: k-distance, reachability distance
//! reach_k(a, b) = max(k-dist(b), d(a, b)), local reachability density
//! lrd(a) = 1 / mean reach over a's neighborhood, LOF(a) = mean neighbor
//! lrd / lrd(a). The neighborhood contains every point within the
//! k-distance, so ties at the k-th distance are all included.
//!
//! Densities are stabilized as lrd = 1 / (mean reach + 1e-10); a point set
//! of identical points then scores exactly 1 everywhere, and mixed
//! duplicate clusters stay finite.

use crate::detect::ScoreVector;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

const LRD_STABILIZER: f64 = 1e-10;

pub fn lof(distances: &SquareMatrix, k: usize) -> Result<ScoreVector> {
    let n = distances.size();
    if k == 0 {
        return Err(Error::Parameter("lof needs k >= 1".into()));
    }
    if n <= k {
        return Err(Error::Parameter(format!(
            "lof needs more samples than neighbors, got N={n} k={k}"
        )));
    }

    // k-distance and (tie-inclusive) neighborhoods
    let mut kdist = vec![0.0; n];
    let mut neighborhoods: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| distances[(i, a)].total_cmp(&distances[(i, b)]));
        let kd = distances[(i, order[k - 1])];
        kdist[i] = kd;
        let nbrs: Vec<usize> = order
            .into_iter()
            .take_while(|&j| distances[(i, j)] <= kd)
            .collect();
        neighborhoods.push(nbrs);
    }

    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let nbrs = &neighborhoods[i];
            let sum: f64 = nbrs
                .iter()
                .map(|&j| kdist[j].max(distances[(i, j)]))
                .sum();
            1.0 / (sum / nbrs.len() as f64 + LRD_STABILIZER)
        })
        .collect();

    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let nbrs = &neighborhoods[i];
            let mean_nbr_lrd: f64 = nbrs.iter().map(|&j| lrd[j]).sum::<f64>() / nbrs.len() as f64;
            mean_nbr_lrd / lrd[i]
        })
        .collect();

    Ok(ScoreVector::new(scores, "lof", format!("k={k}")))
}
