//! Controlled perturbation experiments on k-regular graphs: how fast does
//! the WL distance between two near-identical graphs grow with iterations,
//! as a function of the perturbation size and the degree k.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{flip_labels, generate_k_regular, rewire_edges, Graph, GraphDataset};
use crate::kernel::wl_kernel;
use crate::rng::stream_rng;

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimCase {
    /// Identical all-A graphs; flip m labels to B independently in each copy.
    LabelFlip,
    /// Identical graphs with random A/B labels; rewire r edge pairs in one copy.
    EdgeRewire,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    pub k: usize,
    pub case: SimCase,
    pub magnitudes: Vec<usize>,
    pub iterations: usize,
    pub rounds: usize,
    pub seed: u64,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.n * self.k % 2 != 0 {
            return Err(Error::Parameter(format!(
                "n*k must be even, got n={} k={}",
                self.n, self.k
            )));
        }
        if self.rounds == 0 {
            return Err(Error::Parameter("rounds must be >= 1".into()));
        }
        if self.case == SimCase::LabelFlip {
            if let Some(&m) = self.magnitudes.iter().find(|&&m| m > self.n) {
                return Err(Error::Parameter(format!(
                    "cannot flip {m} labels on {} nodes",
                    self.n
                )));
            }
        }
        Ok(())
    }
}

/// Distance statistics for one magnitude: `mean[l]` and `std[l]` of the WL
/// distance at iterations 0..=L, averaged over rounds.
#[derive(Debug, Clone)]
pub struct SimCurve {
    pub k: usize,
    pub magnitude: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub rounds: usize,
}

impl SimCurve {
    pub fn standard_error(&self, iteration: usize) -> f64 {
        self.std[iteration] / (self.rounds as f64).sqrt()
    }
}

/// WL distance 1 - normalized cumulative similarity between the pair, at
/// every iteration prefix 0..=L.
fn wl_distance_curve(a: Graph, b: Graph, iterations: usize, alphabet: usize) -> Vec<f64> {
    let ds = GraphDataset::new("sim", vec![a, b], vec![0, 0], alphabet)
        .expect("simulation graphs share one alphabet");
    let km = wl_kernel(&ds, iterations);
    (0..=iterations)
        .map(|l| (1.0 - km.normalized_cumulative_through(l)[(0, 1)]).clamp(0.0, 1.0))
        .collect()
}

/// Distance curves per round for one (graph pair construction) recipe.
fn run_rounds(
    config: &SimConfig,
    k: usize,
    magnitude: usize,
    per_round: impl Fn(u64) -> Vec<f64> + Sync,
) -> SimCurve {
    let curves: Vec<Vec<f64>> = (0..config.rounds as u64)
        .into_par_iter()
        .map(|round| per_round(round))
        .collect();
    let iters = config.iterations + 1;
    let mut mean = vec![0.0; iters];
    let mut std = vec![0.0; iters];
    for l in 0..iters {
        let vals: Vec<f64> = curves.iter().map(|c| c[l]).collect();
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        mean[l] = m;
        if vals.len() > 1 {
            let var =
                vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            std[l] = var.sqrt();
        }
    }
    SimCurve {
        k,
        magnitude,
        mean,
        std,
        rounds: config.rounds,
    }
}

// Round-local seeds: the base graph stream is shared by every magnitude of
// a round, perturbation streams are per (round, magnitude, copy).
fn base_seed(seed: u64, k: usize, round: u64) -> u64 {
    seed ^ (round.wrapping_mul(0x9e37_79b9_7f4a_7c15)) ^ ((k as u64) << 48)
}

fn perturb_stream(round: u64, magnitude: usize, copy: u64) -> u64 {
    1 + round * 4 + copy + ((magnitude as u64) << 32)
}

/// Case 1: all nodes labeled A, m labels flipped to B independently in each
/// of the two copies.
pub fn case1_curve(config: &SimConfig) -> Result<Vec<SimCurve>> {
    if config.case != SimCase::LabelFlip {
        return Err(Error::Parameter("case1_curve needs SimCase::LabelFlip".into()));
    }
    config.validate()?;
    curves_for_k(config, config.k)
}

/// Case 2: random A/B labels (p = 1/2), r edge pairs rewired in one copy.
pub fn case2_curve(config: &SimConfig) -> Result<Vec<SimCurve>> {
    if config.case != SimCase::EdgeRewire {
        return Err(Error::Parameter("case2_curve needs SimCase::EdgeRewire".into()));
    }
    config.validate()?;
    curves_for_k(config, config.k)
}

fn curves_for_k(config: &SimConfig, k: usize) -> Result<Vec<SimCurve>> {
    // dry-run one base graph so parameter errors surface before rayon
    generate_k_regular(config.n, k, base_seed(config.seed, k, 0))?;
    let curves = config
        .magnitudes
        .iter()
        .map(|&magnitude| {
            run_rounds(config, k, magnitude, |round| {
                let bs = base_seed(config.seed, k, round);
                let base = generate_k_regular(config.n, k, bs)
                    .expect("validated base graph parameters");
                match config.case {
                    SimCase::LabelFlip => {
                        let flip = |copy: u64| {
                            flip_labels(
                                &base,
                                magnitude,
                                0,
                                1,
                                bs ^ perturb_stream(round, magnitude, copy),
                            )
                            .expect("m <= n checked in validate")
                        };
                        wl_distance_curve(flip(0), flip(1), config.iterations, 2)
                    }
                    SimCase::EdgeRewire => {
                        let mut rng = stream_rng(bs, perturb_stream(round, magnitude, 2));
                        let labels: Vec<u32> =
                            (0..config.n).map(|_| u32::from(rng.random::<bool>())).collect();
                        let labeled = Graph::new(
                            config.n,
                            base.edges().to_vec(),
                            labels,
                        )
                        .expect("base graph is simple");
                        let rewired = rewire_edges(
                            &labeled,
                            magnitude,
                            bs ^ perturb_stream(round, magnitude, 3),
                        )
                        .expect("k-regular graphs admit double-edge swaps");
                        wl_distance_curve(labeled, rewired, config.iterations, 2)
                    }
                }
            })
        })
        .collect();
    Ok(curves)
}

/// Fixed perturbation, sweep over k: one curve per k value.
pub fn vary_k_curve(
    n: usize,
    k_values: &[usize],
    case: SimCase,
    magnitude: usize,
    iterations: usize,
    rounds: usize,
    seed: u64,
) -> Result<Vec<SimCurve>> {
    let mut out = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let config = SimConfig {
            n,
            k,
            case,
            magnitudes: vec![magnitude],
            iterations,
            rounds,
            seed,
        };
        config.validate()?;
        out.extend(curves_for_k(&config, k)?);
    }
    Ok(out)
}

/// Long-format CSV: case, n, k, magnitude, iteration, mean_distance, std, rounds.
pub fn curves_to_csv(case: SimCase, n: usize, curves: &[SimCurve]) -> String {
    use std::fmt::Write as _;
    let case_tag = match case {
        SimCase::LabelFlip => 1,
        SimCase::EdgeRewire => 2,
    };
    let mut out = String::from("case,n,k,magnitude,iteration,mean_distance,std,rounds\n");
    for c in curves {
        for l in 0..c.mean.len() {
            let _ = writeln!(
                out,
                "{case_tag},{n},{},{},{l},{:.8e},{:.8e},{}",
                c.k, c.magnitude, c.mean[l], c.std[l], c.rounds
            );
        }
    }
    out
}
