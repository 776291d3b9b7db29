use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use glod_core::io::write_atomic;
use glod_core::{
    case1_curve, case2_curve, downsample, load_tu_dataset, run_benchmark, sweep_iterations,
    sweep_rate, vary_k_curve, BenchmarkRun, DetectorSpec, EmbedSpec, FeatureMode, FlipClass,
    GraphDataset, MethodSpec, SimCase, SimConfig,
};

use crate::manifest::Manifest;
use crate::opts::{
    BenchArgs, Cli, Command, DiagArgs, FlipTableArgs, MethodOpts, SimArgs, SweepItersArgs,
    SweepRateArgs,
};
use crate::{CliError, CliResult};

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Bench(args) => bench(args),
        Command::SweepRate(args) => sweep_rate_cmd(args),
        Command::SweepIters(args) => sweep_iters_cmd(args),
        Command::Diag(args) => diag(args),
        Command::Sim(args) => sim(args),
        Command::FlipTable(args) => flip_table(args),
    }
}

const VALID_METHODS: &str =
    "wl+lof, wl+ocsvm, pk+lof, pk+ocsvm, fgsd+lof, fgsd+ocsvm, fgsd+iforest";

fn parse_method(opts: &MethodOpts) -> CliResult<MethodSpec> {
    let (embed_name, detector_name) = opts
        .method
        .split_once('+')
        .ok_or_else(|| usage(format!("method must be <embed>+<detector>; valid: {VALID_METHODS}")))?;
    let embed = match embed_name {
        "wl" => EmbedSpec::Wl {
            iterations: opts.iterations,
        },
        "pk" => EmbedSpec::Pk {
            iterations: opts.iterations,
            bin_width: opts.bin_width,
        },
        "fgsd" => EmbedSpec::Fgsd {
            bins: opts.fgsd_bins,
            range_max: opts.fgsd_range,
            node_limit: if opts.allow_large_graphs { None } else { Some(2000) },
        },
        other => {
            return Err(usage(format!(
                "unknown embedding `{other}`; valid methods: {VALID_METHODS}"
            )))
        }
    };
    let detector = match detector_name {
        "lof" => DetectorSpec::Lof {
            neighbors: opts.neighbors,
        },
        "ocsvm" => DetectorSpec::Ocsvm { nu: opts.nu },
        "iforest" => DetectorSpec::IsolationForest {
            trees: opts.trees,
            subsample: opts.subsample,
        },
        other => {
            return Err(usage(format!(
                "unknown detector `{other}`; valid methods: {VALID_METHODS}"
            )))
        }
    };
    let spec = MethodSpec { embed, detector };
    spec.validate()
        .map_err(|e| usage(format!("{e}; valid methods: {VALID_METHODS}")))?;
    Ok(spec)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load_dataset(data_dir: &Path, name: &str) -> CliResult<GraphDataset> {
    let dir = data_dir.join(name);
    if !dir.is_dir() {
        let mut available: Vec<String> = std::fs::read_dir(data_dir)
            .map(|rd| {
                rd.filter_map(|e| e.ok())
                    .filter(|e| e.path().is_dir())
                    .map(|e| e.file_name().to_string_lossy().into_owned())
                    .collect()
            })
            .unwrap_or_default();
        available.sort();
        return Err(usage(format!(
            "unknown dataset `{name}`; available under {}: {}",
            data_dir.display(),
            if available.is_empty() {
                "(none)".to_string()
            } else {
                available.join(", ")
            }
        )));
    }
    Ok(load_tu_dataset(&dir, name)?)
}

fn seed_list(count: u64) -> Vec<u64> {
    (0..count).collect()
}

fn mode_of(slice: bool) -> FeatureMode {
    if slice {
        FeatureMode::SliceFullData
    } else {
        FeatureMode::RecomputePerVariant
    }
}

fn iterations_column(run: &BenchmarkRun) -> String {
    run.method
        .embed
        .iterations()
        .map(|l| l.to_string())
        .unwrap_or_default()
}

/// Long-format results rows: dataset,method,dc,rate,L,seed,auc.
fn results_csv(runs: &[BenchmarkRun]) -> String {
    let mut out = String::from("dataset,method,dc,rate,L,seed,auc\n");
    for run in runs {
        for cell in &run.cells {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.8e}",
                run.dataset,
                run.method.name(),
                run.downsampled_class,
                run.rate,
                iterations_column(run),
                cell.seed,
                cell.auc
            );
        }
    }
    out
}

/// Summary rows: dataset,method,dc,mean_auc,std.
fn summary_csv(runs: &[BenchmarkRun]) -> String {
    let mut out = String::from("dataset,method,dc,mean_auc,std\n");
    for run in runs {
        let _ = writeln!(
            out,
            "{},{},{},{:.8e},{:.8e}",
            run.dataset,
            run.method.name(),
            run.downsampled_class,
            run.mean_auc,
            run.std_auc
        );
    }
    out
}

fn common_manifest(
    command: &str,
    args_data: &crate::opts::DataOpts,
    method: &MethodSpec,
    seeds: &[u64],
    mode: FeatureMode,
) -> CliResult<Manifest> {
    let mut manifest = Manifest::new(command);
    manifest.set("dataset", &args_data.dataset);
    manifest.set("data_dir", args_data.data_dir.display());
    manifest.set("method", method.name());
    manifest.set("method_config", method.config_string());
    manifest.set("feature_mode", mode.tag());
    if !matches!(method.embed, EmbedSpec::Fgsd { .. }) {
        manifest.set("kernel_similarity", "normalized cumulative over iterations 0..=L");
    }
    manifest.seeds = seeds.to_vec();
    manifest.hash_inputs(&args_data.data_dir.join(&args_data.dataset), &args_data.dataset)?;
    Ok(manifest)
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let dataset = load_dataset(&args.data.data_dir, &args.data.dataset)?;
    let seeds = seed_list(args.run.seeds);
    let mode = mode_of(args.run.slice_mode);
    let run = run_benchmark(
        &dataset,
        &method,
        args.dc,
        args.run.rate,
        &seeds,
        mode,
        args.run.cache_dir.as_deref(),
    )?;

    std::fs::create_dir_all(&args.out)?;
    let runs = [run];
    write_atomic(&args.out.join("results.csv"), results_csv(&runs).as_bytes())?;
    write_atomic(&args.out.join("summary.csv"), summary_csv(&runs).as_bytes())?;

    let mut manifest = common_manifest("bench", &args.data, &method, &seeds, mode)?;
    manifest.set("dc", args.dc);
    manifest.set("rate", args.run.rate);
    if let Some(dir) = &args.run.cache_dir {
        manifest.set("cache_dir", dir.display());
    }
    manifest.outputs = vec!["results.csv".into(), "summary.csv".into()];
    manifest.write(&args.out)?;

    let run = &runs[0];
    println!(
        "{} {} dc={} rate={}: mean AUC {:.3} (std {:.3}) over {} seeds",
        run.dataset,
        run.method.name(),
        run.downsampled_class,
        run.rate,
        run.mean_auc,
        run.std_auc,
        run.cells.len()
    );
    Ok(())
}

fn sweep_rate_cmd(args: SweepRateArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    let dataset = load_dataset(&args.data.data_dir, &args.data.dataset)?;
    let seeds = seed_list(args.run.seeds);
    let mode = mode_of(args.run.slice_mode);
    let runs = sweep_rate(
        &dataset,
        &method,
        &args.rates,
        &seeds,
        mode,
        args.run.cache_dir.as_deref(),
    )?;

    std::fs::create_dir_all(&args.out)?;
    write_atomic(&args.out.join("results.csv"), results_csv(&runs).as_bytes())?;
    let mut by_rate = String::from("dataset,method,dc,rate,mean_auc,std\n");
    for run in &runs {
        let _ = writeln!(
            by_rate,
            "{},{},{},{},{:.8e},{:.8e}",
            run.dataset,
            run.method.name(),
            run.downsampled_class,
            run.rate,
            run.mean_auc,
            run.std_auc
        );
    }
    write_atomic(&args.out.join("summary_by_rate.csv"), by_rate.as_bytes())?;

    let mut manifest = common_manifest("sweep-rate", &args.data, &method, &seeds, mode)?;
    manifest.set(
        "rates",
        args.rates
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.outputs = vec!["results.csv".into(), "summary_by_rate.csv".into()];
    manifest.write(&args.out)?;
    println!("wrote {} runs to {}", runs.len(), args.out.display());
    Ok(())
}

fn sweep_iters_cmd(args: SweepItersArgs) -> CliResult<()> {
    let method = parse_method(&args.method)?;
    if matches!(method.embed, EmbedSpec::Fgsd { .. }) {
        return Err(usage("sweep-iters needs a propagation method (wl or pk)"));
    }
    let dataset = load_dataset(&args.data.data_dir, &args.data.dataset)?;
    let seeds = seed_list(args.run.seeds);
    let mode = mode_of(args.run.slice_mode);
    let runs = sweep_iterations(
        &dataset,
        &method,
        &args.iteration_values,
        args.run.rate,
        &seeds,
        mode,
        args.run.cache_dir.as_deref(),
    )?;

    std::fs::create_dir_all(&args.out)?;
    write_atomic(&args.out.join("results.csv"), results_csv(&runs).as_bytes())?;

    // per-L gap table pairing the two variants
    let mut gap = String::from("dataset,method,L,auc0,auc1,gap\n");
    for &l in &args.iteration_values {
        let of_class = |dc| {
            runs.iter()
                .find(|r| r.downsampled_class == dc && r.method.embed.iterations() == Some(l))
        };
        let classes = {
            let mut cs: Vec<u32> = runs.iter().map(|r| r.downsampled_class).collect();
            cs.sort_unstable();
            cs.dedup();
            cs
        };
        if let (Some(r0), Some(r1)) = (of_class(classes[0]), of_class(classes[1])) {
            let _ = writeln!(
                gap,
                "{},{},{l},{:.8e},{:.8e},{:.8e}",
                r0.dataset,
                r0.method.name(),
                r0.mean_auc,
                r1.mean_auc,
                (r0.mean_auc - r1.mean_auc).abs()
            );
        }
    }
    write_atomic(&args.out.join("gap_by_iterations.csv"), gap.as_bytes())?;

    let mut manifest = common_manifest("sweep-iters", &args.data, &method, &seeds, mode)?;
    manifest.set("rate", args.run.rate);
    manifest.set(
        "iterations",
        args.iteration_values
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.outputs = vec!["results.csv".into(), "gap_by_iterations.csv".into()];
    manifest.write(&args.out)?;
    println!("wrote {} runs to {}", runs.len(), args.out.display());
    Ok(())
}

fn diag(args: DiagArgs) -> CliResult<()> {
    use glod_core::diagnostics::{full_diagnostic, DiagnosticMethod};
    let method = match args.method.as_str() {
        "wl" => DiagnosticMethod::Wl,
        "pk" => DiagnosticMethod::Pk {
            bin_width: args.bin_width,
            seed: args.seed,
        },
        "fgsd" => DiagnosticMethod::Fgsd {
            params: glod_core::FgsdParams {
                bins: args.fgsd_bins,
                range_max: args.fgsd_range,
                node_limit: if args.allow_large_graphs { None } else { Some(2000) },
            },
        },
        other => return Err(usage(format!("unknown diag method `{other}`; valid: wl, pk, fgsd"))),
    };
    let dataset = load_dataset(&args.data.data_dir, &args.data.dataset)?;

    let (subject, grouping, grouping_tag) = if args.grouping == "variant" {
        let variant = downsample(&dataset, args.dc, args.rate, args.variant_seed)?;
        let subject = dataset.subset(&variant.member_indices, &dataset.name);
        let grouping: Vec<u32> = variant.truth.iter().map(|&t| u32::from(t)).collect();
        (subject, grouping, format!("variant(dc={},rate={},seed={})", args.dc, args.rate, args.variant_seed))
    } else {
        let grouping = dataset.class_labels.clone();
        (dataset.clone(), grouping, "class".to_string())
    };

    let report = full_diagnostic(
        &subject,
        &method,
        &args.iteration_values,
        &grouping,
        args.neighbors,
        args.cumulative,
    )?;
    std::fs::create_dir_all(&args.out)?;
    let files = report.write_csv_bundle(&args.out)?;

    let mut manifest = Manifest::new("diag");
    manifest.set("dataset", &args.data.dataset);
    manifest.set("method", args.method);
    manifest.set("grouping", grouping_tag);
    manifest.set("neighbors", args.neighbors);
    manifest.set(
        "slices",
        if args.cumulative { "cumulative-through-l" } else { "per-iteration" },
    );
    if method != DiagnosticMethod::Wl {
        manifest.set("bin_width", args.bin_width);
        manifest.set("seed", args.seed);
    }
    manifest.hash_inputs(&args.data.data_dir.join(&args.data.dataset), &args.data.dataset)?;
    manifest.outputs = files;
    manifest.write(&args.out)?;
    println!(
        "wrote {} iteration bundles to {}",
        report.iterations.len(),
        args.out.display()
    );
    Ok(())
}

fn sim(args: SimArgs) -> CliResult<()> {
    let case = match args.case {
        1 => SimCase::LabelFlip,
        2 => SimCase::EdgeRewire,
        other => return Err(usage(format!("case must be 1 or 2, got {other}"))),
    };
    let magnitudes = match case {
        SimCase::LabelFlip => {
            if !args.rewires.is_empty() {
                return Err(usage("case 1 takes --m, not --r"));
            }
            args.flips.clone()
        }
        SimCase::EdgeRewire => {
            if !args.flips.is_empty() {
                return Err(usage("case 2 takes --r, not --m"));
            }
            args.rewires.clone()
        }
    };
    if magnitudes.is_empty() {
        return Err(usage("need at least one perturbation magnitude (--m or --r)"));
    }
    if args.k.is_empty() {
        return Err(usage("need at least one degree --k"));
    }

    let curves = if args.k.len() == 1 {
        let config = SimConfig {
            n: args.n,
            k: args.k[0],
            case,
            magnitudes,
            iterations: args.iterations,
            rounds: args.rounds,
            seed: args.seed,
        };
        match case {
            SimCase::LabelFlip => case1_curve(&config)?,
            SimCase::EdgeRewire => case2_curve(&config)?,
        }
    } else {
        if magnitudes.len() != 1 {
            return Err(usage(
                "sweeping k takes exactly one perturbation magnitude",
            ));
        }
        vary_k_curve(
            args.n,
            &args.k,
            case,
            magnitudes[0],
            args.iterations,
            args.rounds,
            args.seed,
        )?
    };

    std::fs::create_dir_all(&args.out)?;
    let csv = glod_core::sim::curves_to_csv(case, args.n, &curves);
    write_atomic(&args.out.join("curves.csv"), csv.as_bytes())?;

    let mut manifest = Manifest::new("sim");
    manifest.set("case", args.case);
    manifest.set("n", args.n);
    manifest.set(
        "k",
        args.k.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","),
    );
    manifest.set(
        "magnitudes",
        curves
            .iter()
            .map(|c| c.magnitude.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    manifest.set("iterations", args.iterations);
    manifest.set("rounds", args.rounds);
    manifest.set(
        "distance",
        "1 - normalized cumulative WL similarity through each iteration",
    );
    manifest.set(
        "case2_labeling",
        "independent A/B with probability 1/2 under the experiment seed",
    );
    manifest.seeds = vec![args.seed];
    manifest.outputs = vec!["curves.csv".into()];
    manifest.write(&args.out)?;
    println!("wrote {} curves to {}", curves.len(), args.out.display());
    Ok(())
}

#[derive(Debug, Clone)]
struct SummaryRow {
    dataset: String,
    method: String,
    dc: u32,
    mean_auc: f64,
}

fn collect_summary_rows(dir: &Path, rows: &mut Vec<SummaryRow>) -> CliResult<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_summary_rows(&path, rows)?;
        } else if path.file_name().is_some_and(|n| n == "summary.csv") {
            let text = std::fs::read_to_string(&path)?;
            for (ln, line) in text.lines().enumerate().skip(1) {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() < 5 {
                    return Err(CliError::Runtime(glod_core::Error::Format {
                        file: path.display().to_string(),
                        line: ln + 1,
                        message: "expected dataset,method,dc,mean_auc,std".into(),
                    }));
                }
                let parse_err = |what: &str| {
                    CliError::Runtime(glod_core::Error::Format {
                        file: path.display().to_string(),
                        line: ln + 1,
                        message: format!("bad {what}"),
                    })
                };
                rows.push(SummaryRow {
                    dataset: fields[0].to_string(),
                    method: fields[1].to_string(),
                    dc: fields[2].parse().map_err(|_| parse_err("dc"))?,
                    mean_auc: fields[3].parse().map_err(|_| parse_err("mean_auc"))?,
                });
            }
        }
    }
    Ok(())
}

fn flip_table(args: FlipTableArgs) -> CliResult<()> {
    let mut rows = Vec::new();
    collect_summary_rows(&args.results, &mut rows)?;
    if rows.is_empty() {
        return Err(usage(format!(
            "no summary.csv files under {}",
            args.results.display()
        )));
    }

    // (dataset, method) -> dc -> mean auc; first row wins on duplicates
    let mut cells: BTreeMap<(String, String), BTreeMap<u32, f64>> = BTreeMap::new();
    for row in rows {
        cells
            .entry((row.dataset.clone(), row.method.clone()))
            .or_default()
            .entry(row.dc)
            .or_insert(row.mean_auc);
    }

    let mut table = String::from("dataset,method,auc0,auc1,gap,sum,classification\n");
    let mut gaps = Vec::new();
    for ((dataset, method), by_dc) in &cells {
        let mut dcs: Vec<u32> = by_dc.keys().copied().collect();
        dcs.sort_unstable();
        if dcs.len() == 2 {
            let (a0, a1) = (by_dc[&dcs[0]], by_dc[&dcs[1]]);
            let gap = (a0 - a1).abs();
            gaps.push(gap);
            let _ = writeln!(
                table,
                "{dataset},{method},{a0:.8e},{a1:.8e},{gap:.8e},{:.8e},{}",
                a0 + a1,
                FlipClass::classify(a0, a1).tag()
            );
        } else {
            let _ = writeln!(table, "{dataset},{method},,,,,incomplete");
        }
    }
    std::fs::create_dir_all(&args.out)?;
    write_atomic(&args.out.join("flip_table.csv"), table.as_bytes())?;

    let mut stats = String::from("gap_threshold,count,total,fraction\n");
    for threshold in [0.2, 0.3, 0.4] {
        let count = gaps.iter().filter(|&&g| g >= threshold).count();
        let frac = if gaps.is_empty() { 0.0 } else { count as f64 / gaps.len() as f64 };
        let _ = writeln!(stats, "{threshold},{count},{},{frac:.4}", gaps.len());
    }
    write_atomic(&args.out.join("flip_stats.csv"), stats.as_bytes())?;

    let mut manifest = Manifest::new("flip-table");
    manifest.set("results_dir", args.results.display());
    manifest.set("cells", cells.len());
    manifest.outputs = vec!["flip_table.csv".into(), "flip_stats.csv".into()];
    manifest.write(&args.out)?;
    println!("wrote flip table with {} cells to {}", cells.len(), args.out.display());
    Ok(())
}
