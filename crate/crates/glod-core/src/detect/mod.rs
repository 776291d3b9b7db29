//! Point-cloud and kernel outlier detectors. All score vectors follow the
//! convention higher = more outlying.

pub mod iforest;
pub mod lof;
pub mod ocsvm;

pub use iforest::isolation_forest;
pub use lof::lof;
pub use ocsvm::{ocsvm, ocsvm_solve, OcsvmModel};

use std::fmt::Write as _;

/// Per-sample outlier scores with ground-truth flags and the detector
/// configuration that produced them.
#[derive(Debug, Clone)]
pub struct ScoreVector {
    pub scores: Vec<f64>,
    pub truth: Vec<bool>,
    pub method: String,
    pub config: String,
}

impl ScoreVector {
    pub fn new(scores: Vec<f64>, method: impl Into<String>, config: impl Into<String>) -> ScoreVector {
        let n = scores.len();
        debug_assert!(scores.iter().all(|s| s.is_finite()), "scores must be finite");
        ScoreVector {
            scores,
            truth: vec![false; n],
            method: method.into(),
            config: config.into(),
        }
    }

    pub fn with_truth(mut self, truth: Vec<bool>) -> ScoreVector {
        assert_eq!(truth.len(), self.scores.len());
        self.truth = truth;
        self
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// CSV export: graph_index, score, is_outlier, method, config_hash.
    pub fn to_csv(&self) -> String {
        let hash = crate::cache::fnv1a(self.config.as_bytes());
        let mut out = String::from("graph_index,score,is_outlier,method,config_hash\n");
        for (i, (s, t)) in self.scores.iter().zip(&self.truth).enumerate() {
            let _ = writeln!(out, "{i},{s:.8e},{},{},{hash:016x}", u8::from(*t), self.method);
        }
        out
    }
}
