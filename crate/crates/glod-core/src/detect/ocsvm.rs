//! One-class SVM on a precomputed kernel, solved in the nu-parameterized
//! dual: minimize 1/2 a^T K a subject to 0 <= a_i <= 1/(nu N), sum a = 1.
//!
//! The solver does SMO-style pairwise coordinate updates on the maximal
//! violating pair until the KKT violation drops below 1e-4 (or 1e5 update
//! sweeps). Scores are -g(x) with g(x_i) = (K a)_i - rho.

use crate::detect::ScoreVector;
use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

const KKT_TOLERANCE: f64 = 1e-4;
const MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct OcsvmModel {
    pub alpha: Vec<f64>,
    pub rho: f64,
    /// g_i = (K alpha)_i at the solution.
    pub gradient: Vec<f64>,
    /// Maximal KKT violation at termination.
    pub kkt_residual: f64,
    pub sweeps: usize,
    /// Objective value 1/2 a^T K a after every sweep.
    pub objective_trace: Vec<f64>,
}

impl OcsvmModel {
    /// Decision value g(x_i) = sum_j alpha_j K(i, j) - rho.
    pub fn decision(&self, i: usize) -> f64 {
        self.gradient[i] - self.rho
    }
}

pub fn ocsvm_solve(kernel: &SquareMatrix, nu: f64) -> Result<OcsvmModel> {
    let n = kernel.size();
    if !(0.0..=1.0).contains(&nu) || nu == 0.0 {
        return Err(Error::Parameter(format!("nu must be in (0, 1], got {nu}")));
    }
    if !kernel.is_symmetric(1e-8) {
        return Err(Error::Input("ocsvm kernel must be symmetric".into()));
    }
    let q = nu * n as f64;
    if q < 1.0 {
        return Err(Error::Parameter(format!(
            "infeasible bound: nu*N = {q} < 1"
        )));
    }
    let bound = 1.0 / q;

    // Feasible start: first floor(nu*N) points at the bound, remainder on the next.
    let full = q.floor() as usize;
    let mut alpha = vec![0.0; n];
    for a in alpha.iter_mut().take(full.min(n)) {
        *a = bound;
    }
    if full < n {
        alpha[full] = (q - full as f64) * bound;
    }

    let mut gradient: Vec<f64> = (0..n)
        .map(|i| {
            alpha
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0.0)
                .map(|(j, &a)| a * kernel[(i, j)])
                .sum()
        })
        .collect();

    let objective = |alpha: &[f64], gradient: &[f64]| -> f64 {
        0.5 * alpha.iter().zip(gradient).map(|(a, g)| a * g).sum::<f64>()
    };

    let mut trace = vec![objective(&alpha, &gradient)];
    let eps = bound * 1e-12;
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        // maximal violating pair: raise the smallest gradient among
        // non-upper-bound points, lower the largest among non-zero points
        let mut up: Option<usize> = None;
        let mut low: Option<usize> = None;
        for i in 0..n {
            if alpha[i] < bound - eps && up.is_none_or(|u| gradient[i] < gradient[u]) {
                up = Some(i);
            }
            if alpha[i] > eps && low.is_none_or(|l| gradient[i] > gradient[l]) {
                low = Some(i);
            }
        }
        let (u, l) = match (up, low) {
            (Some(u), Some(l)) => (u, l),
            // every variable pinned: the feasible set is a single point
            _ => {
                residual = 0.0;
                break;
            }
        };
        residual = gradient[l] - gradient[u];
        if residual < KKT_TOLERANCE {
            break;
        }
        let curvature = kernel[(u, u)] + kernel[(l, l)] - 2.0 * kernel[(u, l)];
        let step_unclipped = if curvature > 1e-15 {
            residual / curvature
        } else {
            f64::INFINITY
        };
        let step = step_unclipped.min(bound - alpha[u]).min(alpha[l]);
        alpha[u] += step;
        alpha[l] -= step;
        for i in 0..n {
            gradient[i] += step * (kernel[(i, u)] - kernel[(i, l)]);
        }
        sweeps += 1;
        trace.push(objective(&alpha, &gradient));
    }

    polish_free_set(kernel, &mut alpha, &mut gradient, &mut residual, bound);

    // rho: median gradient over free support vectors, otherwise the midpoint
    // of the KKT bracket [max g over upper-bound SVs, min g over zeros].
    let mut free: Vec<f64> = (0..n)
        .filter(|&i| alpha[i] > eps && alpha[i] < bound - eps)
        .map(|i| gradient[i])
        .collect();
    let rho = if free.is_empty() {
        let lower = (0..n)
            .filter(|&i| alpha[i] >= bound - eps)
            .map(|i| gradient[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..n)
            .filter(|&i| alpha[i] <= eps)
            .map(|i| gradient[i])
            .fold(f64::INFINITY, f64::min);
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    } else {
        free.sort_by(f64::total_cmp);
        let m = free.len();
        if m % 2 == 1 {
            free[m / 2]
        } else {
            0.5 * (free[m / 2 - 1] + free[m / 2])
        }
    };

    Ok(OcsvmModel {
        alpha,
        rho,
        gradient,
        kkt_residual: residual.max(0.0),
        sweeps,
        objective_trace: trace,
    })
}

/// Final KKT solve on the free set identified by the SMO loop: pairwise
/// updates stop at the 1e-4 violation threshold, which can leave the free
/// variables ~1e-4 off their exact stationary values. Solving the
/// equality-constrained block exactly removes that residual; the polished
/// point is kept only if it stays in the box and satisfies the pinned
/// variables' KKT inequalities.
fn polish_free_set(
    kernel: &SquareMatrix,
    alpha: &mut [f64],
    gradient: &mut [f64],
    residual: &mut f64,
    bound: f64,
) {
    let n = alpha.len();
    let eps = bound * 1e-7;
    let free: Vec<usize> = (0..n)
        .filter(|&i| alpha[i] > eps && alpha[i] < bound - eps)
        .collect();
    if free.is_empty() || free.len() > 512 {
        return;
    }
    let pinned_mass: f64 = (0..n)
        .filter(|&i| alpha[i] >= bound - eps)
        .map(|_| bound)
        .sum();

    // solve [K_ff, -1; 1^T, 0] [a_f; rho] = [-K_fp * C; 1 - pinned_mass]
    let m = free.len() + 1;
    let mut sys = vec![vec![0.0; m + 1]; m];
    for (r, &i) in free.iter().enumerate() {
        for (c, &j) in free.iter().enumerate() {
            sys[r][c] = kernel[(i, j)];
        }
        sys[r][free.len()] = -1.0;
        let mut rhs = 0.0;
        for j in 0..n {
            if alpha[j] >= bound - eps && !free.contains(&j) {
                rhs -= kernel[(i, j)] * bound;
            }
        }
        sys[r][m] = rhs;
    }
    for c in 0..free.len() {
        sys[free.len()][c] = 1.0;
    }
    sys[free.len()][m] = 1.0 - pinned_mass;

    // Gaussian elimination with partial pivoting
    for col in 0..m {
        let Some(pivot) = (col..m).max_by(|&x, &y| sys[x][col].abs().total_cmp(&sys[y][col].abs()))
        else {
            return;
        };
        if sys[pivot][col].abs() < 1e-12 {
            return;
        }
        sys.swap(col, pivot);
        let p = sys[col][col];
        for c in 0..=m {
            sys[col][c] /= p;
        }
        for r in 0..m {
            if r != col {
                let factor = sys[r][col];
                for c in 0..=m {
                    sys[r][c] -= factor * sys[col][c];
                }
            }
        }
    }
    let candidate_free: Vec<f64> = (0..free.len()).map(|r| sys[r][m]).collect();
    let rho = sys[free.len()][m];
    if candidate_free
        .iter()
        .any(|&a| !(-1e-12..=bound + 1e-12).contains(&a))
    {
        return;
    }
    let mut candidate = vec![0.0; n];
    for i in 0..n {
        if alpha[i] >= bound - eps {
            candidate[i] = bound;
        }
    }
    for (idx, &i) in free.iter().enumerate() {
        candidate[i] = candidate_free[idx].clamp(0.0, bound);
    }
    let new_gradient: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| candidate[j] > 0.0)
                .map(|j| candidate[j] * kernel[(i, j)])
                .sum()
        })
        .collect();
    let tol = 1e-9 * (1.0 + rho.abs());
    for i in 0..n {
        let ok = if candidate[i] <= 1e-12 {
            new_gradient[i] >= rho - tol
        } else if candidate[i] >= bound - 1e-12 {
            new_gradient[i] <= rho + tol
        } else {
            (new_gradient[i] - rho).abs() <= 1e-7 * (1.0 + rho.abs())
        };
        if !ok {
            return;
        }
    }
    alpha.copy_from_slice(&candidate);
    gradient.copy_from_slice(&new_gradient);
    let up = (0..n)
        .filter(|&i| alpha[i] < bound - 1e-12)
        .map(|i| gradient[i])
        .fold(f64::INFINITY, f64::min);
    let low = (0..n)
        .filter(|&i| alpha[i] > 1e-12)
        .map(|i| gradient[i])
        .fold(f64::NEG_INFINITY, f64::max);
    if up.is_finite() && low.is_finite() {
        *residual = (low - up).max(0.0);
    } else {
        *residual = 0.0;
    }
}

/// Outlier scores -g(x_i); higher = more outlying.
pub fn ocsvm(kernel: &SquareMatrix, nu: f64) -> Result<ScoreVector> {
    let model = ocsvm_solve(kernel, nu)?;
    let scores: Vec<f64> = (0..kernel.size()).map(|i| -model.decision(i)).collect();
    Ok(ScoreVector::new(scores, "ocsvm", format!("nu={nu}")))
}
