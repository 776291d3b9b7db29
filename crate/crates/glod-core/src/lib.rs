//! Benchmark harness and diagnostics for graph-level outlier detection on
//! repurposed binary graph-classification datasets.
//!
//! The pipeline: load or generate node-labeled graphs ([`graph`], [`tu`]),
//! turn them into pairwise similarities or embeddings ([`kernel`],
//! [`fgsd`]), score them with point-cloud outlier detectors ([`detect`]),
//! and evaluate both down-sampled variants of a dataset ([`benchmark`]).
//! [`diagnostics`] measures the embedding space itself (NN-Radius,
//! NN-Disagreement%, MDS) and [`sim`] isolates the propagation
//! sparsification effect on synthetic k-regular graphs.

pub mod benchmark;
pub mod cache;
pub mod detect;
pub mod diagnostics;
pub mod eigen;
pub mod error;
pub mod fgsd;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod matrix;
pub mod rng;
pub mod sim;
pub mod tu;

pub use benchmark::{
    downsample, flip_report, roc_auc, roc_auc_scores, run_benchmark, sweep_iterations, sweep_rate,
    BenchCell, BenchmarkRun, BenchmarkVariant, DetectorSpec, EmbedSpec, FeatureMode, FlipClass,
    FlipReport, MethodSpec,
};
pub use detect::{isolation_forest, lof, ocsvm, ScoreVector};
pub use diagnostics::{classical_mds, full_diagnostic, nn_disagreement, nn_radius};
pub use error::{Error, Result};
pub use fgsd::{
    embedding_distance, fgsd_embed, harmonic_spectral_distances, Embedding, FgsdParams,
};
pub use graph::{
    degree_labeling, flip_labels, generate_k_regular, rewire_edges, Graph, GraphDataset,
    PerturbationKind, PerturbationSpec,
};
pub use kernel::{kernel_distance, pk_kernel, wl_kernel, KernelMatrix};
pub use matrix::SquareMatrix;
pub use sim::{case1_curve, case2_curve, vary_k_curve, SimCase, SimConfig, SimCurve};
pub use tu::{load_tu_dataset, write_tu_dataset};
