//! Acceptance suite: reproduction targets and property suites, one test per
//! criterion, each printing a PASS/FAIL line. Run with
//! `cargo test -p glod-core --test acceptance -- --nocapture`.
//!
//! Criteria 1, 2, 4, 5, 6 and 9 need the TU datasets under `data/` (or
//! `GLOD_DATA_DIR`); DD, PROTEINS, NCI1 and IMDB-BINARY ship with the repo.

use std::path::PathBuf;
use std::sync::OnceLock;

use glod_core::*;

fn data_root() -> PathBuf {
    std::env::var_os("GLOD_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn load(name: &str) -> GraphDataset {
    let dir = data_root().join(name);
    load_tu_dataset(&dir, name).unwrap_or_else(|e| {
        panic!(
            "dataset {name} not loadable from {} ({e}); set GLOD_DATA_DIR or restore data/",
            dir.display()
        )
    })
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

fn seeds10() -> Vec<u64> {
    (0..10).collect()
}

fn wl_lof() -> MethodSpec {
    MethodSpec {
        embed: EmbedSpec::Wl { iterations: 5 },
        detector: DetectorSpec::Lof { neighbors: 20 },
    }
}

struct TableCell {
    dataset: &'static str,
    auc: [f64; 2],
    expected: [f64; 2],
    classification: FlipClass,
}

/// Criterion 1 rows, shared with criterion 3.
fn wl_lof_cells() -> &'static Vec<TableCell> {
    static CELLS: OnceLock<Vec<TableCell>> = OnceLock::new();
    CELLS.get_or_init(|| {
        let expectations = [
            ("DD", [0.186, 0.815]),
            ("PROTEINS", [0.276, 0.664]),
            ("NCI1", [0.730, 0.349]),
            ("IMDB-BINARY", [0.603, 0.651]),
        ];
        expectations
            .iter()
            .map(|(name, expected)| {
                let ds = load(name);
                let run = |dc| {
                    run_benchmark(
                        &ds,
                        &wl_lof(),
                        dc,
                        0.1,
                        &seeds10(),
                        FeatureMode::RecomputePerVariant,
                        None,
                    )
                    .unwrap()
                };
                let (r0, r1) = (run(0), run(1));
                TableCell {
                    dataset: name,
                    auc: [r0.mean_auc, r1.mean_auc],
                    expected: *expected,
                    classification: flip_report(&r0, &r1).unwrap().classification,
                }
            })
            .collect()
    })
}

/// Criterion 2 numbers, shared with criterion 3.
fn pk_lof_dd() -> &'static (f64, f64) {
    static CELL: OnceLock<(f64, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let ds = load("DD");
        let method = MethodSpec {
            embed: EmbedSpec::Pk {
                iterations: 5,
                bin_width: 0.1,
            },
            detector: DetectorSpec::Lof { neighbors: 20 },
        };
        let run = |dc| {
            run_benchmark(
                &ds,
                &method,
                dc,
                0.1,
                &seeds10(),
                FeatureMode::RecomputePerVariant,
                None,
            )
            .unwrap()
            .mean_auc
        };
        (run(0), run(1))
    })
}

#[test]
fn criterion_1_reference_aucs_wl_lof() {
    let expected_class = |name: &str| {
        if name == "IMDB-BINARY" {
            FlipClass::BothBetterThanRandom
        } else {
            FlipClass::PerformanceFlip
        }
    };
    let mut detail = String::new();
    let mut pass = true;
    for cell in wl_lof_cells() {
        for v in 0..2 {
            let err = (cell.auc[v] - cell.expected[v]).abs();
            if err > 0.06 {
                pass = false;
            }
        }
        if cell.classification != expected_class(cell.dataset) {
            pass = false;
        }
        detail.push_str(&format!(
            "{}: {:.3}/{:.3} (expect {:.3}/{:.3}, {}) ",
            cell.dataset,
            cell.auc[0],
            cell.auc[1],
            cell.expected[0],
            cell.expected[1],
            cell.classification.tag()
        ));
    }
    report("criterion 1 (reference AUCs, WL+LOF, ±0.06)", pass, &detail);
}

#[test]
fn criterion_2_reference_aucs_pk_lof() {
    let &(auc0, auc1) = pk_lof_dd();
    let within = (auc0 - 0.194).abs() <= 0.08 && (auc1 - 0.824).abs() <= 0.08;
    let direction = auc1 > 0.5 && auc0 < 0.5;
    let sum = auc0 + auc1;
    let sum_ok = (0.93..=1.07).contains(&sum);
    report(
        "criterion 2 (reference AUCs, DD PK+LOF, ±0.08)",
        within && direction && sum_ok,
        &format!("DD pk+lof: {auc0:.3}/{auc1:.3}, sum {sum:.3}"),
    );
}

#[test]
fn criterion_3_auc_complement() {
    // Flip-classified cells from criteria 1-2 must have AUCs summing to
    // 1 +/- 0.06. Note the NCI1 reference values pinned by criterion 1
    // (0.730/0.349) themselves sum to 1.079, outside this band, so a
    // faithful reproduction is expected to fail that cell.
    let mut pass = true;
    let mut detail = String::new();
    for cell in wl_lof_cells() {
        if cell.classification == FlipClass::PerformanceFlip {
            let sum = cell.auc[0] + cell.auc[1];
            if (sum - 1.0).abs() > 0.06 {
                pass = false;
                detail.push_str(&format!(
                    "{} sum {:.3} OUTSIDE 1±0.06 (reference sums to {:.3}) ",
                    cell.dataset,
                    sum,
                    cell.expected[0] + cell.expected[1]
                ));
            } else {
                detail.push_str(&format!("{} sum {:.3} ", cell.dataset, sum));
            }
        }
    }
    let &(p0, p1) = pk_lof_dd();
    if (p0 + p1 - 1.0).abs() > 0.06 {
        pass = false;
    }
    detail.push_str(&format!("DD-pk sum {:.3}; ", p0 + p1));

    // exact complement identity on 1000 random score vectors
    let mut rng = rng::seeded_rng(2024);
    use rand::Rng;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(2..200);
        let scores: Vec<f64> = (0..n)
            .map(|_| (rng.random_range(0..30) as f64) / 29.0)
            .collect();
        let mut truth: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        if truth.iter().all(|&t| t) {
            truth[0] = false;
        }
        if truth.iter().all(|&t| !t) {
            truth[0] = true;
        }
        let flipped: Vec<bool> = truth.iter().map(|&t| !t).collect();
        let a = roc_auc_scores(&scores, &truth).unwrap();
        let b = roc_auc_scores(&scores, &flipped).unwrap();
        worst = worst.max((a + b - 1.0).abs());
    }
    if worst > 1e-12 {
        pass = false;
    }
    detail.push_str(&format!("identity worst dev {worst:.2e}"));
    report("criterion 3 (AUC complement)", pass, &detail);
}

#[test]
fn criterion_4_rate_invariance() {
    let ds = load("DD");
    let rates = [0.05, 0.1, 0.2, 0.4, 0.6, 0.85];
    let runs = sweep_rate(
        &ds,
        &wl_lof(),
        &rates,
        &seeds10(),
        FeatureMode::RecomputePerVariant,
        None,
    )
    .unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for dc in [0u32, 1] {
        let aucs: Vec<f64> = runs
            .iter()
            .filter(|r| r.downsampled_class == dc)
            .map(|r| r.mean_auc)
            .collect();
        let spread = aucs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - aucs.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        if spread > 0.08 {
            pass = false;
        }
        detail.push_str(&format!("dc={dc} spread {spread:.3} "));
    }
    report("criterion 4 (rate invariance DD, spread <= 0.08)", pass, &detail);
}

#[test]
fn criterion_5_growing_gap() {
    let ds = load("DD");
    // The propagation axis counts kernel slices: its left endpoint is the
    // plain label histogram, so slice counts {1,3,5,7,9,11} are internal
    // max iterations {0,2,4,6,8,10}.
    let slice_counts = [1usize, 3, 5, 7, 9, 11];
    let ls: Vec<usize> = slice_counts.iter().map(|s| s - 1).collect();
    let runs = sweep_iterations(
        &ds,
        &wl_lof(),
        &ls,
        0.1,
        &seeds10(),
        FeatureMode::RecomputePerVariant,
        None,
    )
    .unwrap();
    // paired per-seed gaps at each L
    let seed_gaps: Vec<Vec<f64>> = ls
        .iter()
        .map(|&l| {
            let cells = |dc: u32| {
                &runs
                    .iter()
                    .find(|r| r.downsampled_class == dc && r.method.embed.iterations() == Some(l))
                    .unwrap()
                    .cells
            };
            cells(0)
                .iter()
                .zip(cells(1).iter())
                .map(|(a, b)| (a.auc - b.auc).abs())
                .collect()
        })
        .collect();
    let gaps: Vec<f64> = seed_gaps
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();

    // Note: after the initial rise the measured DD gap drifts down by
    // ~0.001-0.004 per sampled step (four consecutive decreases), so the
    // at-most-one-violation clause fails even though the net growth holds
    // with margin and every decrease is far below the 0.03 allowance.
    let grows = gaps[gaps.len() - 1] > gaps[0];
    let mut violations = 0;
    let mut worst_decrease = 0.0f64;
    for w in gaps.windows(2) {
        if w[1] < w[0] {
            violations += 1;
            worst_decrease = worst_decrease.max(w[0] - w[1]);
        }
    }
    let pass = grows && violations <= 1 && worst_decrease <= 0.03;
    report(
        "criterion 5 (growing gap DD over propagation axis)",
        pass,
        &format!(
            "gaps {gaps:.3?} over slice counts {slice_counts:?}, net growth {:+.3}, \
             {violations} decreases (worst {worst_decrease:.4}, allowance 0.03)",
            gaps[gaps.len() - 1] - gaps[0]
        ),
    );
}

#[test]
fn criterion_6_sparsification() {
    let ds = load("DD");
    let wl = wl_kernel(&ds, 5);
    let pk = pk_kernel(&ds, 5, 0.1, 0);
    let wl_means: Vec<f64> = (1..=5)
        .map(|l| wl.normalized_per_iteration(l).mean_off_diagonal())
        .collect();
    let pk_means: Vec<f64> = (1..=5)
        .map(|l| pk.normalized_per_iteration(l).mean_off_diagonal())
        .collect();
    let strictly_decreasing = wl_means.windows(2).all(|w| w[1] < w[0]);
    let wl_rel = (wl_means[0] - wl_means[4]) / wl_means[0];
    let pk_rel = (pk_means[0] - pk_means[4]) / pk_means[0];
    let pass = strictly_decreasing && pk_rel < wl_rel;
    report(
        "criterion 6 (sparsification DD, WL faster than PK)",
        pass,
        &format!("WL means {wl_means:.4?} (rel drop {wl_rel:.3}), PK rel drop {pk_rel:.3}"),
    );
}

#[test]
fn criterion_7_simulation() {
    let start = std::time::Instant::now();
    let config = SimConfig {
        n: 50,
        k: 5,
        case: SimCase::LabelFlip,
        magnitudes: vec![1, 2, 5, 10],
        iterations: 10,
        rounds: 100,
        seed: 7,
    };
    let curves = case1_curve(&config).unwrap();
    let mut pass = true;
    let mut detail = String::new();

    // ordered by m within one standard error of the difference
    for pair in curves.windows(2) {
        let (small, big) = (&pair[0], &pair[1]);
        for l in 0..=config.iterations {
            let slack = (small.standard_error(l).powi(2) + big.standard_error(l).powi(2)).sqrt();
            if big.mean[l] < small.mean[l] - slack {
                pass = false;
                detail.push_str(&format!(
                    "m={} < m={} at l={l}; ",
                    big.magnitude, small.magnitude
                ));
            }
        }
    }
    // non-decreasing after iteration 1
    for curve in &curves {
        for l in 2..=config.iterations {
            if curve.mean[l] < curve.mean[l - 1] {
                pass = false;
                detail.push_str(&format!("m={} dips at l={l}; ", curve.magnitude));
            }
        }
    }

    // vary-k ordering at m=5
    let k_curves = vary_k_curve(50, &[3, 5, 7, 9], SimCase::LabelFlip, 5, 10, 100, 7).unwrap();
    for pair in k_curves.windows(2) {
        let (small, big) = (&pair[0], &pair[1]);
        for l in 0..=10 {
            let slack = (small.standard_error(l).powi(2) + big.standard_error(l).powi(2)).sqrt();
            if big.mean[l] < small.mean[l] - slack {
                pass = false;
                detail.push_str(&format!("k={} < k={} at l={l}; ", big.k, small.k));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs() > 300 {
        pass = false;
        detail.push_str("runtime over 5 minutes; ");
    }
    report(
        "criterion 7 (k-regular simulations)",
        pass,
        &format!("{detail}m-curves and k-curves ordered, {elapsed:.1?}"),
    );
}

mod oracles {
    use glod_core::SquareMatrix;

    /// Gauss-Jordan inverse, written for independence from the crate's
    /// linear algebra path.
    pub fn invert(matrix: &SquareMatrix) -> SquareMatrix {
        let n = matrix.size();
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| matrix.row(i).to_vec()).collect();
        let mut inv: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
                .unwrap();
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            assert!(p.abs() > 1e-12, "singular matrix in oracle");
            for j in 0..n {
                a[col][j] /= p;
                inv[col][j] /= p;
            }
            for i in 0..n {
                if i != col {
                    let factor = a[i][col];
                    for j in 0..n {
                        a[i][j] -= factor * a[col][j];
                        inv[i][j] -= factor * inv[col][j];
                    }
                }
            }
        }
        SquareMatrix::from_rows(inv)
    }

    /// Effective resistance via the Moore-Penrose pseudoinverse
    /// L^+ = (L + J/n)^{-1} - J/n of a connected graph's Laplacian.
    pub fn effective_resistances(graph: &glod_core::Graph) -> SquareMatrix {
        let n = graph.node_count();
        let mut shifted = SquareMatrix::zeros(n);
        for (v, d) in graph.degrees().into_iter().enumerate() {
            shifted[(v, v)] = d as f64;
        }
        for &(u, v) in graph.edges() {
            shifted[(u as usize, v as usize)] -= 1.0;
            shifted[(v as usize, u as usize)] -= 1.0;
        }
        let jn = 1.0 / n as f64;
        for i in 0..n {
            for j in 0..n {
                shifted[(i, j)] += jn;
            }
        }
        let inv = invert(&shifted);
        let pseudo = SquareMatrix::from_fn(n, |i, j| inv[(i, j)] - jn);
        SquareMatrix::from_fn(n, |x, y| {
            pseudo[(x, x)] + pseudo[(y, y)] - 2.0 * pseudo[(x, y)]
        })
    }

    /// Direct transcription of the LOF definition with the same 1e-10
    /// density stabilizer the implementation documents.
    pub fn brute_force_lof(distances: &SquareMatrix, k: usize) -> Vec<f64> {
        let n = distances.size();
        let kdist = |i: usize| -> f64 {
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| distances[(i, j)]).collect();
            d.sort_by(f64::total_cmp);
            d[k - 1]
        };
        let neighborhood = |i: usize| -> Vec<usize> {
            (0..n)
                .filter(|&j| j != i && distances[(i, j)] <= kdist(i))
                .collect()
        };
        let lrd = |i: usize| -> f64 {
            let nbrs = neighborhood(i);
            let mut total = 0.0;
            for &j in &nbrs {
                total += kdist(j).max(distances[(i, j)]);
            }
            1.0 / (total / nbrs.len() as f64 + 1e-10)
        };
        (0..n)
            .map(|i| {
                let nbrs = neighborhood(i);
                let mean: f64 = nbrs.iter().map(|&j| lrd(j)).sum::<f64>() / nbrs.len() as f64;
                mean / lrd(i)
            })
            .collect()
    }

    /// Exact solution of the one-class dual by enumerating active sets
    /// (each variable at 0, at the bound, or free) and solving the
    /// stationarity system for the free block.
    pub fn enumerate_ocsvm(kernel: &SquareMatrix, nu: f64) -> Option<Vec<f64>> {
        let n = kernel.size();
        let bound = 1.0 / (nu * n as f64);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut assignment = vec![0u8; n]; // 0 = zero, 1 = bound, 2 = free
        loop {
            if let Some(alpha) = solve_assignment(kernel, &assignment, bound) {
                let mut obj = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        obj += 0.5 * alpha[i] * kernel[(i, j)] * alpha[j];
                    }
                }
                if best.as_ref().is_none_or(|(b, _)| obj < *b - 1e-12) {
                    best = Some((obj, alpha));
                }
            }
            // advance mixed-radix counter
            let mut pos = 0;
            loop {
                if pos == n {
                    return best.map(|(_, a)| a);
                }
                assignment[pos] += 1;
                if assignment[pos] < 3 {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
        }
    }

    fn solve_assignment(kernel: &SquareMatrix, assignment: &[u8], bound: f64) -> Option<Vec<f64>> {
        let n = assignment.len();
        let free: Vec<usize> = (0..n).filter(|&i| assignment[i] == 2).collect();
        let fixed_sum: f64 = assignment.iter().filter(|&&a| a == 1).count() as f64 * bound;
        let mut alpha = vec![0.0; n];
        for i in 0..n {
            if assignment[i] == 1 {
                alpha[i] = bound;
            }
        }
        if free.is_empty() {
            if (fixed_sum - 1.0).abs() > 1e-9 {
                return None;
            }
        } else {
            // stationarity: K_ff a_f + K_fb a_b = rho 1, plus sum a_f = 1 - fixed_sum
            let m = free.len() + 1;
            let mut sys = vec![vec![0.0; m + 1]; m];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    sys[r][c] = kernel[(i, j)];
                }
                sys[r][free.len()] = -1.0; // -rho
                let mut rhs = 0.0;
                for j in 0..n {
                    if assignment[j] == 1 {
                        rhs -= kernel[(i, j)] * bound;
                    }
                }
                sys[r][m] = rhs;
            }
            for c in 0..free.len() {
                sys[free.len()][c] = 1.0;
            }
            sys[free.len()][m] = 1.0 - fixed_sum;
            let solution = gaussian_solve(&mut sys)?;
            for (idx, &i) in free.iter().enumerate() {
                alpha[i] = solution[idx];
                if !(0.0 - 1e-12..=bound + 1e-12).contains(&alpha[i]) {
                    return None;
                }
            }
        }
        // KKT inequalities
        let gradient: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| alpha[j] * kernel[(i, j)]).sum())
            .collect();
        let rho = if let Some(&f0) = free.first() {
            gradient[f0]
        } else {
            // any value between the bounds works; use the midpoint
            let lower = (0..n)
                .filter(|&i| assignment[i] == 1)
                .map(|i| gradient[i])
                .fold(f64::NEG_INFINITY, f64::max);
            let upper = (0..n)
                .filter(|&i| assignment[i] == 0)
                .map(|i| gradient[i])
                .fold(f64::INFINITY, f64::min);
            if lower > upper + 1e-9 {
                return None;
            }
            match (lower.is_finite(), upper.is_finite()) {
                (true, true) => 0.5 * (lower + upper),
                (true, false) => lower,
                (false, true) => upper,
                (false, false) => 0.0,
            }
        };
        for i in 0..n {
            match assignment[i] {
                0 if gradient[i] < rho - 1e-9 => return None,
                1 if gradient[i] > rho + 1e-9 => return None,
                _ => {}
            }
        }
        Some(alpha)
    }

    fn gaussian_solve(sys: &mut [Vec<f64>]) -> Option<Vec<f64>> {
        let rows = sys.len();
        let cols = sys[0].len();
        for col in 0..rows {
            let pivot = (col..rows).max_by(|&x, &y| sys[x][col].abs().total_cmp(&sys[y][col].abs()))?;
            sys.swap(col, pivot);
            if sys[col][col].abs() < 1e-12 {
                return None;
            }
            let p = sys[col][col];
            for c in 0..cols {
                sys[col][c] /= p;
            }
            for r in 0..rows {
                if r != col {
                    let factor = sys[r][col];
                    for c in 0..cols {
                        sys[r][c] -= factor * sys[col][c];
                    }
                }
            }
        }
        Some((0..rows).map(|r| sys[r][cols - 1]).collect())
    }
}

#[test]
fn criterion_8_property_suites() {
    use rand::Rng;
    let mut detail = String::new();

    // WL per-iteration dot-product monotonicity, 200 random pairs, exact
    let mut rng = rng::seeded_rng(88);
    for case in 0..200u64 {
        let n = rng.random_range(3..25);
        let p = rng.random_range(0.15..0.7);
        let labels_count = rng.random_range(1..4u32);
        let mut make = |seed_shift: u64| {
            let mut local = rng::stream_rng(1000 + case, seed_shift);
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if local.random_range(0.0..1.0) < p {
                        edges.push((u, v));
                    }
                }
            }
            let labels = (0..n).map(|_| local.random_range(0..labels_count)).collect();
            Graph::new(n, edges, labels).unwrap()
        };
        let ds = GraphDataset::new("pair", vec![make(0), make(1)], vec![0, 0], 4).unwrap();
        let km = wl_kernel(&ds, 4);
        for l in 0..4 {
            for (i, j) in [(0, 1), (0, 0), (1, 1)] {
                assert!(
                    km.per_iteration(l + 1)[(i, j)] <= km.per_iteration(l)[(i, j)],
                    "WL monotonicity violated at pair {case}, l={l}"
                );
            }
        }
    }
    detail.push_str("WL monotonicity 200 pairs ok; ");

    // kernel PSD on 5 datasets restricted to N <= 500
    let mut psd_checked = 0;
    for name in ["DD", "PROTEINS", "NCI1", "IMDB-BINARY"] {
        let ds = load(name);
        let idx: Vec<usize> = (0..ds.len().min(500)).collect();
        let sub = ds.subset(&idx, name);
        for km in [wl_kernel(&sub, 3), pk_kernel(&sub, 3, 0.1, 1)] {
            let (min_eig, max_eig) = eigen::eigenvalue_extremes(km.cumulative());
            assert!(
                min_eig >= -1e-6 * max_eig.abs(),
                "{name}: min eig {min_eig:.3e} vs max {max_eig:.3e}"
            );
            psd_checked += 1;
        }
    }
    {
        // fifth dataset: synthetic regular graphs with flipped labels
        let mut graphs = Vec::new();
        for s in 0..60u64 {
            let g = generate_k_regular(12, 3 + (s % 3) as usize, s).unwrap();
            graphs.push(flip_labels(&g, (s % 5) as usize, 0, 1, s).unwrap());
        }
        let classes = (0..60).map(|i| (i % 2) as u32).collect();
        let ds = GraphDataset::new("synthetic", graphs, classes, 2).unwrap();
        for km in [wl_kernel(&ds, 3), pk_kernel(&ds, 3, 0.1, 1)] {
            let (min_eig, max_eig) = eigen::eigenvalue_extremes(km.cumulative());
            assert!(min_eig >= -1e-6 * max_eig.abs());
            psd_checked += 1;
        }
    }
    detail.push_str(&format!("PSD {psd_checked} matrices over 5 datasets ok; "));

    // FGSD harmonic distances equal effective resistances, 100 connected graphs
    for case in 0..100u64 {
        let mut local = rng::stream_rng(4040, case);
        let n = local.random_range(2..=20);
        let mut edges: Vec<(u32, u32)> = (1..n as u32)
            .map(|v| (local.random_range(0..v), v))
            .collect();
        for _ in 0..local.random_range(0..n) {
            let u = local.random_range(0..n as u32);
            let v = local.random_range(0..n as u32);
            if u != v && !edges.contains(&(u.min(v), u.max(v))) {
                edges.push((u.min(v), u.max(v)));
            }
        }
        let g = Graph::new(n, edges, vec![0; n]).unwrap();
        let spectral = harmonic_spectral_distances(&g);
        let resistance = oracles::effective_resistances(&g);
        for x in 0..n {
            for y in 0..n {
                assert!(
                    (spectral[(x, y)] - resistance[(x, y)]).abs() < 1e-6,
                    "graph {case} pair ({x},{y}): {} vs {}",
                    spectral[(x, y)],
                    resistance[(x, y)]
                );
            }
        }
    }
    detail.push_str("FGSD = effective resistance on 100 graphs ok; ");

    // LOF matches the brute-force oracle on 50 random point sets
    for case in 0..50u64 {
        let mut local = rng::stream_rng(5050, case);
        let n = local.random_range(10..=60);
        let dim = local.random_range(1..=3);
        let k = local.random_range(2..=9.min(n - 1));
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| local.random_range(-5.0..5.0)).collect())
            .collect();
        let d = SquareMatrix::from_fn(n, |i, j| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        });
        let ours = lof(&d, k).unwrap().scores;
        let oracle = oracles::brute_force_lof(&d, k);
        for i in 0..n {
            let rel = (ours[i] - oracle[i]).abs() / oracle[i].abs().max(1.0);
            assert!(rel < 1e-12, "LOF mismatch case {case} point {i}");
        }
    }
    detail.push_str("LOF = brute force on 50 sets ok; ");

    // OCSVM matches active-set enumeration on 4-point kernels
    let mut worst_alpha_gap = 0.0f64;
    for case in 0..12u64 {
        let mut local = rng::stream_rng(6060, case);
        let kernel = if case == 0 {
            SquareMatrix::from_rows(vec![
                vec![1.0, 0.9, 0.9, 0.1],
                vec![0.9, 1.0, 0.9, 0.1],
                vec![0.9, 0.9, 1.0, 0.1],
                vec![0.1, 0.1, 0.1, 1.0],
            ])
        } else {
            // random PSD with unit diagonal: normalized Gram of random vectors
            let vecs: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..5).map(|_| local.random_range(-1.0..1.0)).collect())
                .collect();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            SquareMatrix::from_fn(4, |i, j| {
                dot(&vecs[i], &vecs[j]) / (dot(&vecs[i], &vecs[i]) * dot(&vecs[j], &vecs[j])).sqrt()
            })
        };
        for nu in [0.5, 0.75, 0.9, 1.0] {
            let model = ocsvm_solve_public(&kernel, nu);
            let expected = oracles::enumerate_ocsvm(&kernel, nu).expect("feasible QP");
            assert!(model.kkt_residual < 1e-4);
            for i in 0..4 {
                worst_alpha_gap = worst_alpha_gap.max((model.alpha[i] - expected[i]).abs());
            }
        }
    }
    assert!(
        worst_alpha_gap < 1e-6,
        "alpha gap vs enumeration: {worst_alpha_gap:.2e}"
    );
    detail.push_str(&format!("OCSVM alpha within {worst_alpha_gap:.1e} of enumeration; "));

    // classical MDS recovers planar configurations
    for case in 0..40u64 {
        let mut local = rng::stream_rng(7070, case);
        let n = local.random_range(3..=25);
        let pts: Vec<[f64; 2]> = (0..n)
            .map(|_| [local.random_range(-3.0..3.0), local.random_range(-3.0..3.0)])
            .collect();
        let d = SquareMatrix::from_fn(n, |i, j| {
            ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt()
        });
        let mds = classical_mds(&d);
        for i in 0..n {
            for j in 0..n {
                let dx = mds.coordinates[i][0] - mds.coordinates[j][0];
                let dy = mds.coordinates[i][1] - mds.coordinates[j][1];
                let rec = (dx * dx + dy * dy).sqrt();
                assert!(
                    (rec - d[(i, j)]).abs() < 1e-6,
                    "MDS case {case}: {rec} vs {}",
                    d[(i, j)]
                );
            }
        }
    }
    detail.push_str("MDS planar recovery ok");
    report("criterion 8 (property suites)", true, &detail);
}

fn ocsvm_solve_public(kernel: &SquareMatrix, nu: f64) -> glod_core::detect::OcsvmModel {
    glod_core::detect::ocsvm_solve(kernel, nu).unwrap()
}

#[test]
fn criterion_9_reference_aucs_fgsd_dd() {
    let ds = load("DD");
    let method = MethodSpec {
        embed: EmbedSpec::Fgsd {
            bins: 200,
            range_max: 20.0,
            node_limit: None,
        },
        detector: DetectorSpec::Lof { neighbors: 20 },
    };
    let run = |dc| {
        run_benchmark(
            &ds,
            &method,
            dc,
            0.1,
            &seeds10(),
            FeatureMode::RecomputePerVariant,
            None,
        )
        .unwrap()
        .mean_auc
    };
    let (auc0, auc1) = (run(0), run(1));
    let within = (auc0 - 0.628).abs() <= 0.10 && (auc1 - 0.425).abs() <= 0.10;
    let direction = auc0 > auc1;
    report(
        "criterion 9 (reference AUCs, DD FGSD+LOF, ±0.10, dc=0 higher)",
        within && direction,
        &format!("{auc0:.3}/{auc1:.3}"),
    );
}
