//! Down-sampling benchmark construction and evaluation: build outlier
//! variants from a binary classification dataset, score them with a
//! two-stage method, and summarize ROC-AUC per variant.

use std::path::Path;

use rand::seq::SliceRandom;

use crate::detect::{isolation_forest, lof, ocsvm, ScoreVector};
use crate::error::{Error, Result};
use crate::fgsd::{embedding_cosine_kernel, embedding_distance, fgsd_embed, Embedding, FgsdParams};
use crate::graph::GraphDataset;
use crate::kernel::{kernel_distance, pk_kernel, wl_kernel, KernelMatrix};
use crate::rng::seeded_rng;

/// One down-sampled benchmark variant: every graph of the other class kept
/// as inlier, max(1, round(rate * class size)) graphs of `downsampled_class`
/// kept as outliers.
#[derive(Debug, Clone)]
pub struct BenchmarkVariant {
    pub source: String,
    pub downsampled_class: u32,
    pub rate: f64,
    pub seed: u64,
    pub member_indices: Vec<usize>,
    pub truth: Vec<bool>,
}

impl BenchmarkVariant {
    pub fn outlier_count(&self) -> usize {
        self.truth.iter().filter(|&&t| t).count()
    }
}

pub fn downsample(
    dataset: &GraphDataset,
    downsampled_class: u32,
    rate: f64,
    seed: u64,
) -> Result<BenchmarkVariant> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::Parameter(format!("rate must be in (0, 1], got {rate}")));
    }
    let classes = dataset.classes();
    if classes.len() != 2 {
        return Err(Error::Parameter(format!(
            "down-sampling needs a binary dataset, found {} classes",
            classes.len()
        )));
    }
    if !classes.contains(&downsampled_class) {
        return Err(Error::Parameter(format!(
            "class {downsampled_class} not present in dataset {}",
            dataset.name
        )));
    }
    let mut pool = dataset.class_members(downsampled_class);
    let class_size = pool.len();
    // round-half-up, at least one outlier, never more than the class holds
    let count = (((rate * class_size as f64) + 0.5).floor() as usize)
        .max(1)
        .min(class_size);
    let mut rng = seeded_rng(seed);
    let (chosen, _) = pool.partial_shuffle(&mut rng, count);
    let mut member_indices: Vec<usize> = chosen.to_vec();
    member_indices.extend(
        dataset
            .class_labels
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != downsampled_class)
            .map(|(i, _)| i),
    );
    member_indices.sort_unstable();
    let truth = member_indices
        .iter()
        .map(|&i| dataset.class_labels[i] == downsampled_class)
        .collect();
    Ok(BenchmarkVariant {
        source: dataset.name.clone(),
        downsampled_class,
        rate,
        seed,
        member_indices,
        truth,
    })
}

/// ROC-AUC in Mann-Whitney form with average ranks for ties; outliers are
/// the positive class.
pub fn roc_auc(scores: &ScoreVector) -> Result<f64> {
    roc_auc_scores(&scores.scores, &scores.truth)
}

pub fn roc_auc_scores(scores: &[f64], truth: &[bool]) -> Result<f64> {
    assert_eq!(scores.len(), truth.len());
    let n_out = truth.iter().filter(|&&t| t).count();
    let n_in = truth.len() - n_out;
    if n_out == 0 || n_in == 0 {
        return Err(Error::UndefinedAuc(format!(
            "need both classes, got {n_out} outliers and {n_in} inliers"
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut outlier_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks are 1-based; tied entries share the average rank
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if truth[idx] {
                outlier_rank_sum += rank;
            }
        }
        i = j + 1;
    }
    let n_out = n_out as f64;
    let n_in = n_in as f64;
    Ok((outlier_rank_sum - n_out * (n_out + 1.0) / 2.0) / (n_out * n_in))
}

/// Feature half of a two-stage method.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbedSpec {
    Wl {
        iterations: usize,
    },
    Pk {
        iterations: usize,
        bin_width: f64,
    },
    Fgsd {
        bins: usize,
        range_max: f64,
        node_limit: Option<usize>,
    },
}

impl EmbedSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EmbedSpec::Wl { .. } => "wl",
            EmbedSpec::Pk { .. } => "pk",
            EmbedSpec::Fgsd { .. } => "fgsd",
        }
    }

    pub fn iterations(&self) -> Option<usize> {
        match self {
            EmbedSpec::Wl { iterations } | EmbedSpec::Pk { iterations, .. } => Some(*iterations),
            EmbedSpec::Fgsd { .. } => None,
        }
    }
}

/// Detector half of a two-stage method.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectorSpec {
    Lof { neighbors: usize },
    Ocsvm { nu: f64 },
    IsolationForest { trees: usize, subsample: usize },
}

impl DetectorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DetectorSpec::Lof { .. } => "lof",
            DetectorSpec::Ocsvm { .. } => "ocsvm",
            DetectorSpec::IsolationForest { .. } => "iforest",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub embed: EmbedSpec,
    pub detector: DetectorSpec,
}

impl MethodSpec {
    /// Isolation Forest consumes feature rows, not kernel matrices, so it
    /// only pairs with fgsd.
    pub fn validate(&self) -> Result<()> {
        if matches!(self.detector, DetectorSpec::IsolationForest { .. })
            && !matches!(self.embed, EmbedSpec::Fgsd { .. })
        {
            return Err(Error::Parameter(
                "kernel matrix not supported by this detector: iforest pairs only with fgsd".into(),
            ));
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        format!("{}+{}", self.embed.name(), self.detector.name())
    }

    /// Full parameter record, echoed into outputs and cache keys.
    pub fn config_string(&self) -> String {
        let embed = match &self.embed {
            EmbedSpec::Wl { iterations } => format!("wl(L={iterations})"),
            EmbedSpec::Pk {
                iterations,
                bin_width,
            } => format!("pk(L={iterations},w={bin_width})"),
            EmbedSpec::Fgsd {
                bins,
                range_max,
                node_limit,
            } => format!("fgsd(bins={bins},range={range_max},limit={node_limit:?})"),
        };
        let det = match &self.detector {
            DetectorSpec::Lof { neighbors } => format!("lof(k={neighbors})"),
            DetectorSpec::Ocsvm { nu } => format!("ocsvm(nu={nu})"),
            DetectorSpec::IsolationForest { trees, subsample } => {
                format!("iforest(trees={trees},subsample={subsample})")
            }
        };
        format!("{embed}+{det}")
    }
}

/// Whether two-stage features are recomputed on each variant (mirrors
/// deployment) or sliced out of one full-data computation (diagnostics).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    RecomputePerVariant,
    SliceFullData,
}

impl FeatureMode {
    pub fn tag(&self) -> &'static str {
        match self {
            FeatureMode::RecomputePerVariant => "recompute",
            FeatureMode::SliceFullData => "slice",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchCell {
    pub seed: u64,
    pub auc: f64,
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub dataset: String,
    pub method: MethodSpec,
    pub downsampled_class: u32,
    pub rate: f64,
    pub mode: FeatureMode,
    pub cells: Vec<BenchCell>,
    pub mean_auc: f64,
    pub std_auc: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Scores one subset given its kernel matrix (wl/pk methods).
fn score_kernel_subset(
    kernel: &KernelMatrix,
    detector: &DetectorSpec,
    variant_seed: u64,
) -> Result<ScoreVector> {
    let _ = variant_seed;
    match detector {
        DetectorSpec::Lof { neighbors } => lof(&kernel_distance(kernel), *neighbors),
        DetectorSpec::Ocsvm { nu } => ocsvm(kernel.normalized_cumulative(), *nu),
        DetectorSpec::IsolationForest { .. } => Err(Error::Parameter(
            "kernel matrix not supported by this detector".into(),
        )),
    }
}

/// Scores one subset given its embedding rows (fgsd methods).
fn score_embedding_subset(
    embedding: &Embedding,
    detector: &DetectorSpec,
    variant_seed: u64,
) -> Result<ScoreVector> {
    match detector {
        DetectorSpec::Lof { neighbors } => {
            lof(&embedding_distance(embedding).distances, *neighbors)
        }
        DetectorSpec::Ocsvm { nu } => ocsvm(&embedding_cosine_kernel(embedding), *nu),
        DetectorSpec::IsolationForest { trees, subsample } => {
            isolation_forest(&embedding.vectors, *trees, *subsample, variant_seed)
        }
    }
}

fn embedding_subset(embedding: &Embedding, indices: &[usize]) -> Embedding {
    Embedding {
        vectors: indices
            .iter()
            .map(|&i| embedding.vectors[i].clone())
            .collect(),
        bins: embedding.bins,
        bin_width: embedding.bin_width,
        range_max: embedding.range_max,
    }
}

/// Computes (or fetches from the cache) the kernel for a graph subset.
fn subset_kernel(
    dataset: &GraphDataset,
    embed: &EmbedSpec,
    iterations: usize,
    member_indices: Option<&[usize]>,
    hash_seed: u64,
    cache_dir: Option<&Path>,
) -> Result<KernelMatrix> {
    let (kernel_tag, bin_width) = match embed {
        EmbedSpec::Wl { .. } => ("wl", 0.0),
        EmbedSpec::Pk { bin_width, .. } => ("pk", *bin_width),
        EmbedSpec::Fgsd { .. } => {
            return Err(Error::Parameter("fgsd has no kernel matrix".into()))
        }
    };
    let members_key = match member_indices {
        Some(idx) => {
            let bytes: Vec<u8> = idx.iter().flat_map(|i| i.to_le_bytes()).collect();
            format!("{:016x}", crate::cache::fnv1a(&bytes))
        }
        None => "full".to_string(),
    };
    let key = format!(
        "dataset={};kernel={kernel_tag};L={iterations};w={bin_width};seed={hash_seed};members={members_key}",
        dataset.name
    );
    if let Some(dir) = cache_dir {
        if let Some(hit) = crate::cache::load(dir, &key) {
            return Ok(hit);
        }
    }
    let subset_storage;
    let subject = match member_indices {
        Some(idx) => {
            subset_storage = dataset.subset(idx, &dataset.name);
            &subset_storage
        }
        None => dataset,
    };
    let kernel = match embed {
        EmbedSpec::Wl { .. } => wl_kernel(subject, iterations),
        EmbedSpec::Pk { .. } => pk_kernel(subject, iterations, bin_width, hash_seed),
        EmbedSpec::Fgsd { .. } => unreachable!(),
    };
    if let Some(dir) = cache_dir {
        crate::cache::store(dir, &key, &kernel)?;
    }
    Ok(kernel)
}

/// Runs one (dataset, method, downsampled class, rate) benchmark across
/// seeds and reports per-seed AUCs plus their mean and sample std.
///
/// FGSD embeddings are computed once on the full dataset and sliced per
/// variant in both modes: the embedding of a graph does not depend on the
/// rest of the dataset, so this equals recomputing on the subset. The PK
/// hash seed and the Isolation Forest seed are tied to the variant seed in
/// recompute mode, so the 10 down-samplings also average hash variance.
pub fn run_benchmark(
    dataset: &GraphDataset,
    method: &MethodSpec,
    downsampled_class: u32,
    rate: f64,
    seeds: &[u64],
    mode: FeatureMode,
    cache_dir: Option<&Path>,
) -> Result<BenchmarkRun> {
    method.validate()?;
    if seeds.is_empty() {
        return Err(Error::Parameter("need at least one seed".into()));
    }

    let full_embedding: Option<Embedding> = match &method.embed {
        EmbedSpec::Fgsd {
            bins,
            range_max,
            node_limit,
        } => Some(fgsd_embed(
            dataset,
            &FgsdParams {
                bins: *bins,
                range_max: *range_max,
                node_limit: *node_limit,
            },
        )?),
        _ => None,
    };
    let full_kernel: Option<KernelMatrix> = if mode == FeatureMode::SliceFullData
        && !matches!(method.embed, EmbedSpec::Fgsd { .. })
    {
        // slice mode computes one kernel for all variants, so the PK hash
        // seed cannot follow the variant seed; it is pinned to 0
        let iterations = method.embed.iterations().unwrap();
        Some(subset_kernel(dataset, &method.embed, iterations, None, 0, cache_dir)?)
    } else {
        None
    };

    let mut cells = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let variant = downsample(dataset, downsampled_class, rate, seed)?;
        let scores = match (&method.embed, &full_embedding, &full_kernel) {
            (EmbedSpec::Fgsd { .. }, Some(embedding), _) => {
                let sub = embedding_subset(embedding, &variant.member_indices);
                score_embedding_subset(&sub, &method.detector, seed)?
            }
            (_, _, Some(kernel)) => {
                let sub = kernel.submatrix(&variant.member_indices);
                score_kernel_subset(&sub, &method.detector, seed)?
            }
            (embed, _, None) => {
                let iterations = embed.iterations().unwrap();
                let kernel = subset_kernel(
                    dataset,
                    embed,
                    iterations,
                    Some(&variant.member_indices),
                    seed,
                    cache_dir,
                )?;
                score_kernel_subset(&kernel, &method.detector, seed)?
            }
        };
        let scores = scores.with_truth(variant.truth.clone());
        cells.push(BenchCell {
            seed,
            auc: roc_auc(&scores)?,
        });
    }

    let aucs: Vec<f64> = cells.iter().map(|c| c.auc).collect();
    let (mean_auc, std_auc) = mean_std(&aucs);
    Ok(BenchmarkRun {
        dataset: dataset.name.clone(),
        method: method.clone(),
        downsampled_class,
        rate,
        mode,
        cells,
        mean_auc,
        std_auc,
    })
}

/// Runs the benchmark over several rates for both variants.
pub fn sweep_rate(
    dataset: &GraphDataset,
    method: &MethodSpec,
    rates: &[f64],
    seeds: &[u64],
    mode: FeatureMode,
    cache_dir: Option<&Path>,
) -> Result<Vec<BenchmarkRun>> {
    let classes = binary_classes(dataset)?;
    let mut runs = Vec::with_capacity(rates.len() * 2);
    for &rate in rates {
        for &dc in &classes {
            runs.push(run_benchmark(
                dataset, method, dc, rate, seeds, mode, cache_dir,
            )?);
        }
    }
    Ok(runs)
}

/// Runs the benchmark for each iteration budget, reusing one relabeling at
/// the largest L per variant (prefix sums of the per-iteration slices equal
/// a fresh run at the smaller L).
pub fn sweep_iterations(
    dataset: &GraphDataset,
    method: &MethodSpec,
    iteration_values: &[usize],
    rate: f64,
    seeds: &[u64],
    mode: FeatureMode,
    cache_dir: Option<&Path>,
) -> Result<Vec<BenchmarkRun>> {
    method.validate()?;
    if matches!(method.embed, EmbedSpec::Fgsd { .. }) {
        return Err(Error::Parameter(
            "iteration sweeps need a propagation kernel (wl or pk)".into(),
        ));
    }
    let max_l = *iteration_values
        .iter()
        .max()
        .ok_or_else(|| Error::Parameter("empty iteration list".into()))?;
    let classes = binary_classes(dataset)?;

    let full_kernel: Option<KernelMatrix> = if mode == FeatureMode::SliceFullData {
        Some(subset_kernel(dataset, &method.embed, max_l, None, 0, cache_dir)?)
    } else {
        None
    };

    let mut runs = Vec::new();
    for &dc in &classes {
        // per-seed cells for every L, computed from one kernel at max L
        let mut cells_per_l: Vec<Vec<BenchCell>> =
            vec![Vec::with_capacity(seeds.len()); iteration_values.len()];
        for &seed in seeds {
            let variant = downsample(dataset, dc, rate, seed)?;
            let kernel = match &full_kernel {
                Some(full) => full.submatrix(&variant.member_indices),
                None => subset_kernel(
                    dataset,
                    &method.embed,
                    max_l,
                    Some(&variant.member_indices),
                    seed,
                    cache_dir,
                )?,
            };
            for (li, &l) in iteration_values.iter().enumerate() {
                let sim = kernel.normalized_cumulative_through(l);
                let scores = match &method.detector {
                    DetectorSpec::Lof { neighbors } => {
                        lof(&crate::kernel::similarity_to_distance(&sim), *neighbors)?
                    }
                    DetectorSpec::Ocsvm { nu } => ocsvm(&sim, *nu)?,
                    DetectorSpec::IsolationForest { .. } => unreachable!("validated above"),
                };
                let scores = scores.with_truth(variant.truth.clone());
                cells_per_l[li].push(BenchCell {
                    seed,
                    auc: roc_auc(&scores)?,
                });
            }
        }
        for (li, &l) in iteration_values.iter().enumerate() {
            let mut m = method.clone();
            match &mut m.embed {
                EmbedSpec::Wl { iterations } | EmbedSpec::Pk { iterations, .. } => *iterations = l,
                EmbedSpec::Fgsd { .. } => unreachable!(),
            }
            let aucs: Vec<f64> = cells_per_l[li].iter().map(|c| c.auc).collect();
            let (mean_auc, std_auc) = mean_std(&aucs);
            runs.push(BenchmarkRun {
                dataset: dataset.name.clone(),
                method: m,
                downsampled_class: dc,
                rate,
                mode,
                cells: cells_per_l[li].clone(),
                mean_auc,
                std_auc,
            });
        }
    }
    Ok(runs)
}

fn binary_classes(dataset: &GraphDataset) -> Result<[u32; 2]> {
    let classes = dataset.classes();
    if classes.len() != 2 {
        return Err(Error::Parameter(format!(
            "need a binary dataset, found {} classes",
            classes.len()
        )));
    }
    Ok([classes[0], classes[1]])
}

/// Flip classification of a pair of variant AUCs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipClass {
    BothWorseThanRandom,
    BothBetterThanRandom,
    PerformanceFlip,
    /// At least one mean AUC sits exactly at 0.5.
    Indeterminate,
}

impl FlipClass {
    pub fn classify(auc0: f64, auc1: f64) -> FlipClass {
        let (lo, hi) = (auc0.min(auc1), auc0.max(auc1));
        if lo < 0.5 && hi > 0.5 {
            FlipClass::PerformanceFlip
        } else if lo > 0.5 && hi > 0.5 {
            FlipClass::BothBetterThanRandom
        } else if lo < 0.5 && hi < 0.5 {
            FlipClass::BothWorseThanRandom
        } else {
            FlipClass::Indeterminate
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FlipClass::BothWorseThanRandom => "both_worse_than_random",
            FlipClass::BothBetterThanRandom => "both_better_than_random",
            FlipClass::PerformanceFlip => "performance_flip",
            FlipClass::Indeterminate => "indeterminate",
        }
    }
}

/// Pairing of the two down-sampled variants of one (dataset, method) cell.
#[derive(Debug, Clone)]
pub struct FlipReport {
    pub dataset: String,
    pub method: String,
    pub auc0_mean: f64,
    pub auc0_std: f64,
    pub auc1_mean: f64,
    pub auc1_std: f64,
    pub gap: f64,
    pub auc_sum: f64,
    pub classification: FlipClass,
}

pub fn flip_report(run0: &BenchmarkRun, run1: &BenchmarkRun) -> Result<FlipReport> {
    if run0.dataset != run1.dataset
        || run0.method != run1.method
        || run0.rate != run1.rate
        || run0.mode != run1.mode
    {
        return Err(Error::Report(
            "variants were evaluated with different configurations".into(),
        ));
    }
    if run0.downsampled_class == run1.downsampled_class {
        return Err(Error::Report(
            "need both down-sampled variants, got the same class twice".into(),
        ));
    }
    let (a, b) = if run0.downsampled_class < run1.downsampled_class {
        (run0, run1)
    } else {
        (run1, run0)
    };
    Ok(FlipReport {
        dataset: a.dataset.clone(),
        method: a.method.name(),
        auc0_mean: a.mean_auc,
        auc0_std: a.std_auc,
        auc1_mean: b.mean_auc,
        auc1_std: b.std_auc,
        gap: (a.mean_auc - b.mean_auc).abs(),
        auc_sum: a.mean_auc + b.mean_auc,
        classification: FlipClass::classify(a.mean_auc, b.mean_auc),
    })
}
