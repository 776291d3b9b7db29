//! Isolation Forest over dense feature rows.
//!
//! Random-axis, random-threshold trees grown on subsamples of
//! min(subsample, N) points with height limit ceil(log2(m)). Path lengths
//! are corrected with c(m) = 2 H(m-1) - 2(m-1)/m using exact harmonic
//! numbers; score(x) = 2^(-mean path / c(m)).

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::detect::ScoreVector;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

enum Node {
    Split {
        attribute: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        size: usize,
    },
}

/// Average unsuccessful-search path length in a BST of m nodes.
fn average_path_length(m: usize) -> f64 {
    if m <= 1 {
        return 0.0;
    }
    let harmonic: f64 = (1..m).map(|i| 1.0 / i as f64).sum();
    2.0 * harmonic - 2.0 * (m - 1) as f64 / m as f64
}

fn grow(
    data: &[Vec<f64>],
    items: &mut [usize],
    depth: usize,
    limit: usize,
    rng: &mut impl Rng,
) -> Node {
    if depth >= limit || items.len() <= 1 {
        return Node::Leaf { size: items.len() };
    }
    let dim = data[0].len();
    // only attributes with spread can split this node
    let usable: Vec<usize> = (0..dim)
        .filter(|&a| {
            let first = data[items[0]][a];
            items.iter().any(|&i| data[i][a] != first)
        })
        .collect();
    if usable.is_empty() {
        return Node::Leaf { size: items.len() };
    }
    let attribute = usable[rng.random_range(0..usable.len())];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &i in items.iter() {
        lo = lo.min(data[i][attribute]);
        hi = hi.max(data[i][attribute]);
    }
    let threshold = rng.random_range(lo..hi);
    let split = stable_partition(items, |i| data[i][attribute] < threshold);
    let (left_items, right_items) = items.split_at_mut(split);
    Node::Split {
        attribute,
        threshold,
        left: Box::new(grow(data, left_items, depth + 1, limit, rng)),
        right: Box::new(grow(data, right_items, depth + 1, limit, rng)),
    }
}

/// Stable partition; returns the number of elements satisfying `pred`.
fn stable_partition(items: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let mut kept: Vec<usize> = Vec::with_capacity(items.len());
    let mut rest: Vec<usize> = Vec::new();
    for &i in items.iter() {
        if pred(i) {
            kept.push(i);
        } else {
            rest.push(i);
        }
    }
    let split = kept.len();
    items[..split].copy_from_slice(&kept);
    items[split..].copy_from_slice(&rest);
    split
}

fn path_length(node: &Node, x: &[f64], depth: usize) -> f64 {
    match node {
        Node::Leaf { size } => depth as f64 + average_path_length(*size),
        Node::Split {
            attribute,
            threshold,
            left,
            right,
        } => {
            if x[*attribute] < *threshold {
                path_length(left, x, depth + 1)
            } else {
                path_length(right, x, depth + 1)
            }
        }
    }
}

pub fn isolation_forest(
    data: &[Vec<f64>],
    trees: usize,
    subsample: usize,
    seed: u64,
) -> Result<ScoreVector> {
    let n = data.len();
    if n < 2 {
        return Err(Error::Parameter(format!(
            "isolation forest needs N >= 2, got {n}"
        )));
    }
    if trees == 0 || subsample == 0 {
        return Err(Error::Parameter("need trees >= 1 and subsample >= 1".into()));
    }
    let dim = data[0].len();
    if data.iter().any(|r| r.len() != dim) {
        return Err(Error::Input("ragged feature rows".into()));
    }
    let m = subsample.min(n);
    let limit = (m as f64).log2().ceil() as usize;
    let normalizer = average_path_length(m);

    // one independent rng stream per tree keeps the forest identical for
    // any worker count
    let forest: Vec<Node> = (0..trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64 + 1);
            let mut all: Vec<usize> = (0..n).collect();
            let (sampled, _) = all.partial_shuffle(&mut rng, m);
            let mut items: Vec<usize> = sampled.to_vec();
            grow(data, &mut items, 0, limit, &mut rng)
        })
        .collect();

    let scores: Vec<f64> = data
        .par_iter()
        .map(|x| {
            let mean: f64 =
                forest.iter().map(|t| path_length(t, x, 0)).sum::<f64>() / trees as f64;
            if normalizer > 0.0 {
                2f64.powf(-mean / normalizer)
            } else {
                1.0
            }
        })
        .collect();

    Ok(ScoreVector::new(
        scores,
        "iforest",
        format!("trees={trees},subsample={subsample},seed={seed}"),
    ))
}
