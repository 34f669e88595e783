use std::collections::HashMap;
use std::path::Path;
use std::time::Instant;

use mwk_core::engine::{restart_best, run_restarts, Init};
use mwk_core::experiment::{table2_row, table3_row, Table2Options};
use mwk_core::io::{load_csv, normalize_range, save_csv, MASK_TAG};
use mwk_core::metrics::{ari, cluster_entropy, feature_recovery};
use mwk_core::seed::derive_seed;
use mwk_core::select::{collect_weights, fs_mwkpp, sfs_mwkpp};
use mwk_core::synth::{generate, parse_config_name, TABLE2_CONFIGS};
use mwk_core::theory::{
    audit_run, capital_a, capital_l, max_capital_a, theorem_condition, RatioProfile, TheoremInputs,
};
use mwk_core::{
    CenterMode, Dataset, Exec, Exponent, ExponentGrid, FitOptions, MwkError, SelectOptions, WeightStack,
};
use serde_json::json;

use crate::args::*;
use crate::output::{emit, num, Report, Table};
use crate::{CliError, CliResult};

pub fn run(cli: &Cli) -> CliResult<()> {
    mwk_core::exec::set_threads(cli.threads)?;
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let start = Instant::now();
    let report = match &cli.command {
        Command::Cluster(a) => cluster(a, exec)?,
        Command::Select(a) => select(a, exec)?,
        Command::Synth(a) => synth(a)?,
        Command::Eval(a) => eval(a)?,
        Command::Audit(a) => audit(a, exec)?,
        Command::Bench(a) => bench(a, exec)?,
    };
    if cli.emit == Emit::Csv {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    emit(cli, &report, start.elapsed().as_secs_f64() * 1e3)
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn fit_options(f: &FitArgs, exec: Exec) -> FitOptions {
    FitOptions {
        mode: match f.mode {
            Mode::Exact => CenterMode::Exact,
            Mode::Fast => CenterMode::Fast,
        },
        max_iter: f.max_iter,
        exec,
        ..FitOptions::default()
    }
}

/// Load and (unless disabled) range-normalize; dropped features become warnings.
fn load(path: &Path, label: Option<&str>, no_normalize: bool) -> CliResult<(Dataset, Vec<String>)> {
    let data = load_csv(path, label)?;
    if no_normalize {
        return Ok((data, Vec::new()));
    }
    let norm = normalize_range(&data)?;
    let warnings = norm.dropped.iter().map(|n| format!("dropped constant feature {n}")).collect();
    Ok((norm.data, warnings))
}

fn cluster(a: &ClusterArgs, exec: Exec) -> CliResult<Report> {
    let (data, warnings) = load(&a.input.input, a.input.label_column.as_deref(), a.input.no_normalize)?;
    let p = Exponent::new(a.p)?;
    let opts = fit_options(&a.fit, exec);
    let restarts = a.fit.restarts.max(1);
    let best = match a.init {
        InitArg::Mwkpp => restart_best(&data, a.k, p, restarts, a.fit.seed, &opts)?,
        other => {
            let init = if other == InitArg::Kmeanspp { Init::KMeansPlusPlus } else { Init::Random };
            run_restarts(&data, a.k, p, &init, restarts, a.fit.seed, &opts)?
                .into_iter()
                .reduce(|b, r| if r.objective < b.objective { r } else { b })
                .expect("restarts >= 1")
        }
    };
    let assignment = best.partition.assignment();
    let (ari_v, entropy) = match data.labels() {
        Some(l) => (Some(ari(l, assignment)?), Some(cluster_entropy(assignment, l)?)),
        None => (None, None),
    };
    let mut assign = Table::new(&["index", "cluster"]);
    for (i, c) in assignment.iter().enumerate() {
        assign.push(vec![i.to_string(), c.to_string()]);
    }
    if let Some(path) = &a.out {
        assign.save(path)?;
    }
    let mut table = Table::new(&["key", "value"]);
    table.push(vec!["objective".into(), num(best.objective)]);
    table.push(vec!["iterations".into(), best.iterations.to_string()]);
    table.push(vec!["converged".into(), best.converged.to_string()]);
    if let (Some(x), Some(h)) = (ari_v, entropy) {
        table.push(vec!["ari".into(), num(x)]);
        table.push(vec!["entropy".into(), num(h)]);
    }
    let results = json!({
        "k": a.k,
        "p": a.p,
        "objective": best.objective,
        "iterations": best.iterations,
        "converged": best.converged,
        "run_seed": best.seed,
        "sizes": best.partition.sizes(),
        "ari": ari_v,
        "entropy": entropy,
        "feature_names": data.feature_names(),
        "weights": best.weights.matrix().to_rows(),
        "centroids": best.centroids.matrix().to_rows(),
        "flags": best.flags,
        "assignments_path": a.out,
    });
    Ok(Report { seed: Some(a.fit.seed), results, warnings, table })
}

fn select(a: &SelectArgs, exec: Exec) -> CliResult<Report> {
    let (data, warnings) = load(&a.input.input, a.input.label_column.as_deref(), a.input.no_normalize)?;
    let opts = SelectOptions {
        grid: ExponentGrid::parse(&a.grid)?,
        restarts: a.fit.restarts,
        fit: fit_options(&a.fit, exec),
        seed: a.fit.seed,
    };
    let sel = match a.method {
        Method::Fs => fs_mwkpp(&data, a.k, a.r, &opts)?,
        Method::Sfs => sfs_mwkpp(&data, a.k, a.r, a.outer, &opts)?,
    };
    let recovery = match data.informative() {
        Some(mask) if mask.iter().filter(|&&b| b).count() == a.r => {
            Some(feature_recovery(&sel.ranking.selected, mask)?)
        }
        _ => None,
    };
    let names = data.feature_names();
    let mut rank = vec![0usize; names.len()];
    for (pos, &v) in sel.ranking.order.iter().enumerate() {
        rank[v] = pos + 1;
    }
    let mut table = Table::new(&["feature", "name", "score", "rank", "selected"]);
    for v in 0..names.len() {
        table.push(vec![
            v.to_string(),
            names[v].clone(),
            num(sel.ranking.scores[v]),
            rank[v].to_string(),
            (rank[v] <= a.r).to_string(),
        ]);
    }
    if let Some(path) = &a.out {
        table.save(path)?;
    }
    if let Some(path) = &a.save_stack {
        std::fs::write(path, serde_json::to_string(&sel.stack)?)?;
    }
    let results = json!({
        "method": a.method,
        "k": a.k,
        "r": a.r,
        "grid": opts.grid.values(),
        "sample_size": sel.sample_size,
        "scores": sel.ranking.scores,
        "order": sel.ranking.order,
        "selected": sel.ranking.selected,
        "selected_names": sel.ranking.selected.iter().map(|&v| &names[v]).collect::<Vec<_>>(),
        "recovery": recovery,
    });
    Ok(Report { seed: Some(a.fit.seed), results, warnings, table })
}

fn synth(a: &SynthArgs) -> CliResult<Report> {
    let spec = parse_config_name(&a.config)?;
    if a.count == 0 {
        return Err(usage("--count must be >= 1"));
    }
    std::fs::create_dir_all(&a.out_dir)?;
    let stem = format!("{}x{}-{}_{}NF", spec.n_points, spec.m_informative, spec.k_clusters, spec.n_noise);
    let mut table = Table::new(&["path", "seed", "n", "m"]);
    let mut files = Vec::new();
    for i in 0..a.count {
        let seed = derive_seed(a.seed, &[i as u64]);
        let data = generate(&spec.with_seed(seed))?;
        let path = a.out_dir.join(format!("{stem}_{i:03}.csv"));
        save_csv(&data, &path)?;
        let shown = path.display().to_string();
        table.push(vec![shown.clone(), seed.to_string(), data.n().to_string(), data.m().to_string()]);
        files.push(json!({"path": shown, "seed": seed, "n": data.n(), "m": data.m()}));
    }
    let results = json!({"config": spec.name(), "files": files});
    Ok(Report { seed: Some(a.seed), results, warnings: Vec::new(), table })
}

/// One column of a CSV as dense ids, skipping a mask row if present.
fn label_column(path: &Path, column: &str) -> CliResult<Vec<usize>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_path(path).map_err(MwkError::from)?;
    let idx = rdr
        .headers()
        .map_err(MwkError::from)?
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| usage(format!("column {column:?} not found in {}", path.display())))?;
    let mut ids = HashMap::new();
    let mut out = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(MwkError::from)?;
        if row == 0 && record.get(0).map(str::trim) == Some(MASK_TAG) {
            continue;
        }
        let cell = record.get(idx).ok_or(MwkError::Parse {
            row: out.len() + 1,
            col: idx + 1,
            msg: "missing cell".into(),
        })?;
        let next = ids.len();
        out.push(*ids.entry(cell.trim().to_string()).or_insert(next));
    }
    Ok(out)
}

fn eval(a: &EvalArgs) -> CliResult<Report> {
    let truth = label_column(&a.truth, &a.truth_column)?;
    let pred = label_column(&a.pred, &a.pred_column)?;
    let ari_v = ari(&truth, &pred)?;
    let entropy = cluster_entropy(&pred, &truth)?;
    let mut table = Table::new(&["metric", "value"]);
    table.push(vec!["ari".into(), num(ari_v)]);
    table.push(vec!["entropy".into(), num(entropy)]);
    let results = json!({"n": truth.len(), "ari": ari_v, "entropy": entropy});
    Ok(Report { seed: None, results, warnings: Vec::new(), table })
}

fn parse_mask(s: &str) -> CliResult<Vec<bool>> {
    s.split(',')
        .map(|t| match t.trim() {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(usage(format!("mask entries must be 0 or 1, got {other:?}"))),
        })
        .collect()
}

fn audit(a: &AuditArgs, exec: Exec) -> CliResult<Report> {
    if a.theorem {
        return theorem(a);
    }
    let mut warnings = Vec::new();
    let (stack, mask): (WeightStack, Vec<bool>) = if let Some(path) = &a.stack {
        let stack: WeightStack = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let mask = parse_mask(a.mask.as_deref().ok_or_else(|| usage("--stack needs --mask"))?)?;
        (stack, mask)
    } else if let Some(path) = &a.input {
        let (data, w) = load(path, a.label_column.as_deref(), a.no_normalize)?;
        warnings = w;
        let mask = match &a.mask {
            Some(m) => parse_mask(m)?,
            None => data
                .informative()
                .ok_or_else(|| usage("input has no mask row; pass --mask"))?
                .to_vec(),
        };
        let k = a.k.ok_or_else(|| usage("--input needs --k"))?;
        let opts = SelectOptions {
            grid: ExponentGrid::parse(&a.grid)?,
            restarts: a.fit.restarts,
            fit: fit_options(&a.fit, exec),
            seed: a.fit.seed,
        };
        (collect_weights(&data, k, &opts)?, mask)
    } else {
        return Err(usage("audit needs --stack, --input or --theorem"));
    };
    let report = audit_run(&stack, &mask)?;
    let mut table = Table::new(&["p", "sample", "cluster", "noise_below", "noise_total", "any_above"]);
    for pair in &report.pairs {
        table.push(vec![
            num(pair.p),
            pair.sample_id.to_string(),
            pair.cluster.to_string(),
            pair.noise_below.to_string(),
            pair.noise_total.to_string(),
            pair.any_above.to_string(),
        ]);
    }
    let results = serde_json::to_value(&report)?;
    Ok(Report { seed: Some(a.fit.seed), results, warnings, table })
}

fn theorem(a: &AuditArgs) -> CliResult<Report> {
    let need = |x: Option<f64>, name: &str| x.ok_or_else(|| usage(format!("--theorem needs --{name}")));
    let gamma = need(a.gamma, "gamma")?;
    let alpha = need(a.alpha, "alpha")?;
    let p = Exponent::new(need(a.p, "p")?)?;
    let (aa, ll, m) = match (a.a, a.l, a.ratio, a.m) {
        (Some(aa), Some(ll), _, m) => (aa, ll, m.unwrap_or(0)),
        (_, _, Some(ratio), Some(m)) => {
            let profile = RatioProfile::new(vec![ratio; m], p)?;
            (capital_a(&profile), capital_l(&profile), m)
        }
        _ => return Err(usage("--theorem needs --a and --l, or --ratio and --m")),
    };
    let check = theorem_condition(&TheoremInputs { gamma, alpha, p, a: aa, l: ll, m })?;
    let max_a = (m > 0).then(|| max_capital_a(m, gamma));
    let mut table = Table::new(&["key", "value"]);
    table.push(vec!["A".into(), num(aa)]);
    table.push(vec!["L".into(), num(ll)]);
    table.push(vec!["value".into(), num(check.value)]);
    table.push(vec!["threshold".into(), num(check.threshold)]);
    table.push(vec!["satisfied".into(), check.satisfied.to_string()]);
    if let Some(x) = max_a {
        table.push(vec!["max_A".into(), num(x)]);
    }
    let results = json!({"A": aa, "L": ll, "check": check, "max_A": max_a});
    Ok(Report { seed: None, results, warnings: Vec::new(), table })
}

fn bench(a: &BenchArgs, exec: Exec) -> CliResult<Report> {
    let names: Vec<String> = match &a.configs {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => TABLE2_CONFIGS.iter().map(|s| s.to_string()).collect(),
    };
    let specs = names.iter().map(|n| parse_config_name(n)).collect::<Result<Vec<_>, _>>()?;
    if a.datasets == 0 {
        return Err(usage("--datasets must be >= 1"));
    }
    let grid = ExponentGrid::parse(&a.grid)?;
    let fit = fit_options(&a.fit, exec);
    let mut rows = Vec::new();
    let mut table;
    match a.suite {
        Suite::Table2 => {
            table = Table::new(&[
                "config", "datasets", "kmeanspp_mean", "kmeanspp_std", "mwk_all_mean", "mwk_all_std",
                "mwk_best_mean", "mwk_best_std", "mwkpp_all_mean", "mwkpp_all_std", "mwkpp_best_mean",
                "mwkpp_best_std",
            ]);
            for (c, spec) in specs.iter().enumerate() {
                let opts = Table2Options {
                    grid: grid.clone(),
                    runs: a.fit.restarts,
                    fit,
                    seed: derive_seed(a.fit.seed, &[c as u64]),
                };
                let row = table2_row(spec, a.datasets, &opts)?;
                let mut cells = vec![row.config.clone(), row.datasets.to_string()];
                for s in [row.kmeanspp, row.mwk_all, row.mwk_best, row.mwkpp_all, row.mwkpp_best] {
                    cells.push(num(s.mean));
                    cells.push(num(s.std));
                }
                table.push(cells);
                rows.push(serde_json::to_value(&row)?);
            }
        }
        Suite::Table3 => {
            table = Table::new(&["config", "datasets", "recovery_mean", "recovery_std"]);
            for (c, spec) in specs.iter().enumerate() {
                let opts = SelectOptions {
                    grid: grid.clone(),
                    restarts: a.fit.restarts,
                    fit,
                    seed: derive_seed(a.fit.seed, &[c as u64]),
                };
                let row = table3_row(spec, a.datasets, &opts)?;
                table.push(vec![
                    row.config.clone(),
                    row.datasets.to_string(),
                    num(row.recovery.mean),
                    num(row.recovery.std),
                ]);
                rows.push(serde_json::to_value(&row)?);
            }
        }
    }
    Ok(Report { seed: Some(a.fit.seed), results: json!({"suite": a.suite, "rows": rows}), warnings: Vec::new(), table })
}
