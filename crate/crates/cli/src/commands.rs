use std::path::PathBuf;

use clap::Args;
use ftspec::cluster::{
    adjacency, misclustering_rate, select_k, spectral_cluster_with, ClusterConfig, SelectionMethod, DEFAULT_K_MAX,
};
use ftspec::equality::{equality_test_tables, NullVarianceEstimator};
use ftspec::models::{make_group, make_setting, ModelKind};
use ftspec::series::{fit_rows, FitOptions};
use ftspec::spectra::{default_block_count, local_fdft, make_block_plan, BlockPlan};
use ftspec::{BasisSpec, FunctionalTimeSeries, GriddedSample, Matrix};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::emit;
use crate::error::{CliError, CliResult, Context};
use crate::experiments::{cluster_benchmark, mean_sd, rejection_rates, setting_replicates, KRule, SettingDesign};
use crate::formats::{
    matrix_csv, read_collection, read_gridded, read_similarity, series_file_name, write_coefficients, write_json,
    write_text, LabelFile, MatrixEnvelope,
};

pub const DEFAULT_ETA: f64 = 1.0;
pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_REPLICATIONS: usize = 100;
pub const ETA_SWEEP: [f64; 4] = [0.5, 2.5, 5.0, 10.0];

fn out_dir(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_blocks(m: &mut Option<usize>, t: usize) -> CliResult<BlockPlan> {
    let blocks = match *m {
        Some(m) => m,
        None => default_block_count(t)
            .ok_or_else(|| CliError::input(format!("T={t} is not a multiple of 32; pass --m explicitly")))?,
    };
    *m = Some(blocks);
    Ok(make_block_plan(t, blocks)?)
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------- ingest

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    /// Gridded CSV (`id,t,<grid points>...`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of Fourier basis functions.
    #[arg(long)]
    pub l: Option<usize>,
    /// Largest tolerated fraction of missing grid values per curve.
    #[arg(long)]
    pub missing_cap: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct IngestRow {
    t: String,
    residual_norm: f64,
    missing_fraction: f64,
}

#[derive(Debug, Serialize)]
struct SkippedRow {
    t: String,
    line: u64,
    reason: String,
}

#[derive(Debug, Serialize)]
struct IngestSeries {
    id: String,
    file: String,
    #[serde(rename = "T")]
    t: usize,
    #[serde(rename = "L")]
    l: usize,
    rows: Vec<IngestRow>,
    skipped: Vec<SkippedRow>,
}

pub fn ingest(mut args: IngestArgs) -> CliResult<()> {
    let input = args.input.clone().ok_or_else(|| CliError::input("ingest needs --input"))?;
    let l = *args.l.get_or_insert(BasisSpec::INGEST_DIMENSION);
    let cap = *args.missing_cap.get_or_insert(FitOptions::default().missing_cap);
    let out = out_dir(&args.out);
    let spec = BasisSpec::fourier(l)?;
    let file = read_gridded(&input)?;
    let g = file.grid.len();
    let mut report = Vec::new();
    for s in &file.series {
        let rows = s.times.len();
        let values = Matrix::from_row_major(rows, g, s.values.clone())?;
        let sample = GriddedSample::new(values, file.grid.clone()).context(input.display())?;
        let fits = fit_rows(&sample, &spec, FitOptions { missing_cap: cap })?;
        let mut coeffs = Vec::new();
        let mut kept = Vec::new();
        let mut skipped = Vec::new();
        for (r, fit) in fits.into_iter().enumerate() {
            match fit {
                Ok(fit) => {
                    coeffs.extend_from_slice(&fit.coeffs);
                    kept.push(IngestRow {
                        t: s.times[r].clone(),
                        residual_norm: fit.residual_norm,
                        missing_fraction: fit.missing_fraction,
                    });
                }
                Err(e) => {
                    let reason = match e {
                        ftspec::Error::Fit { reason, .. } => reason,
                        other => other.to_string(),
                    };
                    warn!(
                        "{}: skipping series '{}' at t={} (line {}): {reason}",
                        input.display(),
                        s.id,
                        s.times[r],
                        s.lines[r]
                    );
                    skipped.push(SkippedRow {
                        t: s.times[r].clone(),
                        line: s.lines[r],
                        reason,
                    });
                }
            }
        }
        let t = kept.len();
        let series = Matrix::from_row_major(t, l, coeffs)
            .and_then(|m| FunctionalTimeSeries::new(s.id.clone(), m, spec))
            .context(format!("series '{}'", s.id))?;
        let name = series_file_name(&s.id);
        write_coefficients(&out.join(&name), &series)?;
        info!("{}: {t} curves written to {name}", s.id);
        report.push(IngestSeries {
            id: s.id.clone(),
            file: name,
            t,
            l,
            rows: kept,
            skipped,
        });
    }
    write_json(&out.join("ingest_report.json"), &report)?;
    let skipped: usize = report.iter().map(|r| r.skipped.len()).sum();
    println!("ingested {} series ({skipped} curves skipped) into {}", report.len(), out.display());
    emit(&out, "ingest", &args)
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Simulation setting: 1 = {I,II,III}, 2 = {IV,V,VI}, 3 = {I..VI}.
    #[arg(long, conflicts_with = "model")]
    pub setting: Option<u8>,
    /// A single model (I..VI) instead of a setting.
    #[arg(long)]
    pub model: Option<String>,
    /// Realizations per model.
    #[arg(long)]
    pub n: Option<usize>,
    /// Series length.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn simulate(mut args: SimulateArgs) -> CliResult<()> {
    let n = *args.n.get_or_insert(10);
    let t = *args.t.get_or_insert(512);
    let seed = *args.seed.get_or_insert(0);
    let out = out_dir(&args.out);
    let labels = match (&args.model, args.setting) {
        (Some(model), _) => {
            let model: ModelKind = model.parse()?;
            let series = make_group(model, n, t, seed)?;
            for x in &series {
                write_coefficients(&out.join(series_file_name(x.id())), x)?;
            }
            LabelFile {
                ids: series.iter().map(|x| x.id().to_string()).collect(),
                labels: vec![0; n],
                setting: None,
                models: vec![model.to_string()],
            }
        }
        (None, setting) => {
            let setting = *args.setting.get_or_insert(setting.unwrap_or(1));
            let data = make_setting(setting, n, t, seed)?;
            for x in &data.series {
                write_coefficients(&out.join(series_file_name(x.id())), x)?;
            }
            LabelFile {
                ids: data.series.iter().map(|x| x.id().to_string()).collect(),
                labels: data.labels,
                setting: Some(setting),
                models: data.models.iter().map(|m| m.to_string()).collect(),
            }
        }
    };
    write_json(&out.join("labels.json"), &labels)?;
    println!("wrote {} series of length {t} to {}", labels.ids.len(), out.display());
    emit(&out, "simulate", &args)
}

// ---------------------------------------------------------------- similarity

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SimilarityArgs {
    /// Coefficient CSV files or directories of them.
    pub inputs: Vec<PathBuf>,
    /// Number of blocks M (default T/32).
    #[arg(long)]
    pub m: Option<usize>,
    /// Adjacency scale in W = exp(-eta * A).
    #[arg(long)]
    pub eta: Option<f64>,
    /// Labels JSON; adds a label-ordered copy of the matrix.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn similarity(mut args: SimilarityArgs) -> CliResult<()> {
    let collection = read_collection(&args.inputs)?;
    let plan = resolve_blocks(&mut args.m, collection[0].len())?;
    let eta = *args.eta.get_or_insert(DEFAULT_ETA);
    let out = out_dir(&args.out);
    let sim = crate::experiments::similarity_parallel(&collection, &plan)?;
    let w = adjacency(&sim, eta)?;
    write_text(&out.join("similarity.csv"), &matrix_csv(sim.ids(), sim.values()))?;
    write_text(&out.join("adjacency.csv"), &matrix_csv(sim.ids(), w.weights()))?;
    write_json(
        &out.join("similarity.json"),
        &MatrixEnvelope {
            t: Some(plan.total_len()),
            m: Some(plan.blocks()),
            n: Some(plan.block_len()),
            eta: Some(eta),
            ids: sim.ids().to_vec(),
            values: sim.values().rows().map(<[f64]>::to_vec).collect(),
        },
    )?;
    println!(
        "{} series, T={}, M={}, N={}",
        sim.len(),
        plan.total_len(),
        plan.blocks(),
        plan.block_len()
    );
    if let Some(path) = &args.labels {
        let labels = LabelFile::read(path)?.aligned(sim.ids())?;
        let mut order: Vec<usize> = (0..sim.len()).collect();
        order.sort_by_key(|&i| labels[i]);
        let ordered = sim.permuted(&order);
        write_text(&out.join("similarity_ordered.csv"), &matrix_csv(ordered.ids(), ordered.values()))?;
        let (within, between) = block_means(sim.values(), &labels);
        println!("mean A within labels {within:.4}, between labels {between:.4}");
    }
    emit(&out, "similarity", &args)
}

/// Mean off-diagonal entry within and between label groups.
pub fn block_means(values: &Matrix, labels: &[usize]) -> (f64, f64) {
    let (mut w, mut nw, mut b, mut nb) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if i == j {
                continue;
            }
            if labels[i] == labels[j] {
                w += values[(i, j)];
                nw += 1;
            } else {
                b += values[(i, j)];
                nb += 1;
            }
        }
    }
    (w / nw as f64, b / nb as f64)
}

// ---------------------------------------------------------------- cluster

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ClusterArgs {
    /// Similarity matrix (CSV or JSON envelope).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of clusters.
    #[arg(long, conflicts_with = "method")]
    pub k: Option<usize>,
    /// Choose k with relgap, sd1gap, ch or silhouette.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// k-means restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Ground-truth labels JSON; adds the misclustering rate to the report.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Also write the spectral embedding as CSV.
    #[arg(long)]
    pub embedding: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct MisclusteringReport {
    rate: f64,
    exhaustive: bool,
}

#[derive(Debug, Serialize)]
struct ClusterReport {
    ids: Vec<String>,
    labels: Vec<usize>,
    k: usize,
    k_rule: String,
    eta: f64,
    seed: u64,
    inertia: f64,
    eigenvalues: Vec<f64>,
    degenerate_rows: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    selection_scores: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    misclustering: Option<MisclusteringReport>,
}

fn cluster_config(eta: &mut Option<f64>, seed: &mut Option<u64>, restarts: &mut Option<usize>) -> ClusterConfig {
    let mut config = ClusterConfig::new(*eta.get_or_insert(DEFAULT_ETA), *seed.get_or_insert(0));
    config.restarts = *restarts.get_or_insert(config.restarts);
    config
}

pub fn cluster(mut args: ClusterArgs) -> CliResult<()> {
    let input = args.input.clone().ok_or_else(|| CliError::input("cluster needs --input"))?;
    let sim = read_similarity(&input)?;
    let config = cluster_config(&mut args.eta, &mut args.seed, &mut args.restarts);
    let out = out_dir(&args.out);
    let (k, k_rule, scores) = match (args.k, &args.method) {
        (Some(k), _) => (k, "fixed".to_string(), Vec::new()),
        (None, Some(method)) => {
            let method: SelectionMethod = method.parse()?;
            let k_max = *args.k_max.get_or_insert(DEFAULT_K_MAX);
            let sel = select_k(&sim, method, k_max, &config)?;
            (sel.k, method.to_string(), sel.scores)
        }
        (None, None) => return Err(CliError::input("cluster needs --k or --method")),
    };
    let outcome = spectral_cluster_with(&sim, k, &config)?;
    if !outcome.degenerate_rows.is_empty() {
        warn!("{} embedding rows were zero and left unnormalized", outcome.degenerate_rows.len());
    }
    let misclustering = match &args.labels {
        Some(path) => {
            let truth = LabelFile::read(path)?.aligned(sim.ids())?;
            let m = misclustering_rate(&outcome.labels, &truth)?;
            println!("misclustering rate {:.4}", m.rate);
            Some(MisclusteringReport {
                rate: m.rate,
                exhaustive: m.exhaustive,
            })
        }
        None => None,
    };
    if args.embedding {
        let header: Vec<String> = (1..=k).map(|c| format!("e{c}")).collect();
        let mut text = format!("id,{}\n", header.join(","));
        for (id, row) in sim.ids().iter().zip(outcome.embedding.rows()) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            text.push_str(&format!("{id},{}\n", cells.join(",")));
        }
        write_text(&out.join("embedding.csv"), &text)?;
    }
    println!("k = {k} ({k_rule}), inertia {:.6}", outcome.inertia);
    write_json(
        &out.join("cluster_report.json"),
        &ClusterReport {
            ids: sim.ids().to_vec(),
            labels: outcome.labels,
            k,
            k_rule,
            eta: config.eta,
            seed: config.seed,
            inertia: outcome.inertia,
            eigenvalues: outcome.eigenvalues,
            degenerate_rows: outcome.degenerate_rows,
            selection_scores: scores,
            misclustering,
        },
    )?;
    emit(&out, "cluster", &args)
}

// ---------------------------------------------------------------- select-k

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SelectKArgs {
    /// Similarity matrix (CSV or JSON envelope).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Methods to run (relgap, sd1gap, ch, silhouette); all by default.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SelectionRecord {
    method: String,
    k: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    scores: Vec<(usize, f64)>,
}

#[derive(Debug, Serialize)]
struct SelectionReport {
    k_max: usize,
    eta: f64,
    eigenvalues: Vec<f64>,
    results: Vec<SelectionRecord>,
}

pub fn select_k_cmd(mut args: SelectKArgs) -> CliResult<()> {
    let input = args.input.clone().ok_or_else(|| CliError::input("select-k needs --input"))?;
    let sim = read_similarity(&input)?;
    let config = cluster_config(&mut args.eta, &mut args.seed, &mut args.restarts);
    let k_max = *args.k_max.get_or_insert(DEFAULT_K_MAX);
    if args.methods.is_empty() {
        args.methods = SelectionMethod::ALL.iter().map(|m| m.to_string()).collect();
    }
    let methods = args
        .methods
        .iter()
        .map(|m| m.parse::<SelectionMethod>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut eigenvalues = Vec::new();
    let mut results = Vec::new();
    for method in methods {
        let sel = select_k(&sim, method, k_max, &config)?;
        println!("{method}: k = {}", sel.k);
        eigenvalues = sel.eigenvalues;
        results.push(SelectionRecord {
            method: method.to_string(),
            k: sel.k,
            scores: sel.scores,
        });
    }
    let out = out_dir(&args.out);
    write_json(
        &out.join("select_k.json"),
        &SelectionReport {
            k_max,
            eta: config.eta,
            eigenvalues,
            results,
        },
    )?;
    emit(&out, "select-k", &args)
}

// ---------------------------------------------------------------- test

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct TestArgs {
    /// Coefficient CSV files or directories of them.
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Significance level in (0, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Null-variance estimator: decoupled or squared.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Also write the matrix of p-values as CSV.
    #[arg(long)]
    pub p_values: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct TestRecord {
    pair: [String; 2],
    a_hat: f64,
    sigma2_hat: f64,
    statistic: f64,
    p_value: f64,
    reject: bool,
}

pub fn test(mut args: TestArgs) -> CliResult<()> {
    let collection = read_collection(&args.inputs)?;
    if collection.len() < 2 {
        return Err(CliError::input("test needs at least two series"));
    }
    let plan = resolve_blocks(&mut args.m, collection[0].len())?;
    let alpha = *args.alpha.get_or_insert(DEFAULT_ALPHA);
    let estimator: NullVarianceEstimator = args
        .estimator
        .get_or_insert_with(|| NullVarianceEstimator::default().name().to_string())
        .parse()?;
    let out = out_dir(&args.out);
    let tables = collection
        .par_iter()
        .map(|s| local_fdft(s, &plan).context(s.id()))
        .collect::<CliResult<Vec<_>>>()?;
    let d = collection.len();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    let results = pairs
        .par_iter()
        .map(|&(i, j)| {
            equality_test_tables(&tables[i], &tables[j], alpha, estimator)
                .context(format!("pair ({}, {})", collection[i].id(), collection[j].id()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let records: Vec<TestRecord> = pairs
        .iter()
        .zip(&results)
        .map(|(&(i, j), r)| TestRecord {
            pair: [collection[i].id().to_string(), collection[j].id().to_string()],
            a_hat: r.a_hat,
            sigma2_hat: r.sigma2_hat,
            statistic: r.statistic,
            p_value: r.p_value,
            reject: r.reject,
        })
        .collect();
    write_json(&out.join("test_report.json"), &records)?;
    if args.p_values {
        // A series tested against itself has statistic 0, hence p = 1/2.
        let mut p = Matrix::from_fn(d, d, |i, j| if i == j { 0.5 } else { 0.0 });
        for (&(i, j), r) in pairs.iter().zip(&results) {
            p.row_mut(i)[j] = r.p_value;
            p.row_mut(j)[i] = r.p_value;
        }
        let ids: Vec<String> = collection.iter().map(|s| s.id().to_string()).collect();
        write_text(&out.join("p_values.csv"), &matrix_csv(&ids, &p))?;
    }
    let rejected = records.iter().filter(|r| r.reject).count();
    println!("{} pairs tested at alpha={alpha}, {rejected} rejected", records.len());
    emit(&out, "test", &args)
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    #[arg(long)]
    pub setting: Option<u8>,
    /// Realizations per model.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// k rules: true (known k), relgap, sd1gap, ch, silhouette.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Add the known-k misclustering table for eta in {0.5, 2.5, 5, 10}.
    #[arg(long)]
    pub eta_sweep: bool,
    /// Add the size/power table of the equality test (model I against I..VI).
    #[arg(long)]
    pub tests: bool,
    /// Significance levels of the test table.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn fmt_stat(x: f64) -> String {
    format!("{x:.4}")
}

pub fn bench(mut args: BenchArgs) -> CliResult<()> {
    let setting = *args.setting.get_or_insert(1);
    let n = *args.n.get_or_insert(10);
    let t = *args.t.get_or_insert(256);
    let plan = resolve_blocks(&mut args.m, t)?;
    let reps = *args.replications.get_or_insert(DEFAULT_REPLICATIONS);
    if reps == 0 {
        return Err(CliError::input("replications must be at least 1"));
    }
    let eta = *args.eta.get_or_insert(DEFAULT_ETA);
    let k_max = *args.k_max.get_or_insert(DEFAULT_K_MAX);
    let seed = *args.seed.get_or_insert(0);
    if args.methods.is_empty() {
        args.methods = ["true", "relgap", "sd1gap", "ch", "silhouette"].map(String::from).to_vec();
    }
    if args.alphas.is_empty() {
        args.alphas = vec![0.05, 0.10];
    }
    let rules = args.methods.iter().map(|m| m.parse::<KRule>()).collect::<Result<Vec<_>, _>>()?;
    let out = out_dir(&args.out);
    let design = SettingDesign {
        setting,
        n,
        t,
        m: plan.blocks(),
    };

    let replicates = setting_replicates(design, reps, seed)?;
    let scores = cluster_benchmark(&replicates, &rules, &[eta], k_max, seed)?;
    let mut k_rows = Vec::new();
    let mut mis_rows = Vec::new();
    for (r, rule) in rules.iter().enumerate() {
        let ks: Vec<f64> = scores.iter().map(|s| s[r].k as f64).collect();
        let mis: Vec<f64> = scores.iter().map(|s| 100.0 * s[r].misclustering).collect();
        let (km, ksd) = mean_sd(&ks);
        let (mm, msd) = mean_sd(&mis);
        println!("{rule:>10}: k {km:.2} ({ksd:.2}), misclustered {mm:.2}% ({msd:.2})");
        k_rows.push(vec![rule.to_string(), fmt_stat(km), fmt_stat(ksd)]);
        mis_rows.push(vec![rule.to_string(), fmt_stat(mm), fmt_stat(msd)]);
    }
    write_text(&out.join("bench_k.csv"), &csv_table(&["rule", "mean_k", "sd_k"], &k_rows))?;
    write_text(
        &out.join("bench_misclustering.csv"),
        &csv_table(&["rule", "mean_pct", "sd_pct"], &mis_rows),
    )?;

    if args.eta_sweep {
        let sweep = cluster_benchmark(&replicates, &[KRule::Known], &ETA_SWEEP, k_max, seed)?;
        let rows: Vec<Vec<String>> = ETA_SWEEP
            .iter()
            .enumerate()
            .map(|(e, eta)| {
                let mis: Vec<f64> = sweep.iter().map(|s| 100.0 * s[e].misclustering).collect();
                let (mm, msd) = mean_sd(&mis);
                println!("eta {eta:>4}: misclustered {mm:.2}% ({msd:.2})");
                vec![eta.to_string(), "true".into(), fmt_stat(mm), fmt_stat(msd)]
            })
            .collect();
        write_text(&out.join("bench_eta.csv"), &csv_table(&["eta", "rule", "mean_pct", "sd_pct"], &rows))?;
    }

    if args.tests {
        let mut rows = Vec::new();
        for (i, &other) in ModelKind::ALL.iter().enumerate() {
            let summary = rejection_rates(
                ModelKind::I,
                other,
                t,
                plan.blocks(),
                reps,
                &args.alphas,
                NullVarianceEstimator::default(),
                ftspec::rng::derive_seed(seed, &[100 + i as u64]),
            )?;
            for (alpha, rate) in summary.alphas.iter().zip(&summary.rates) {
                println!("I vs {other:<3} alpha {alpha}: rejected {:.1}%", 100.0 * rate);
                rows.push(vec!["I".into(), other.to_string(), alpha.to_string(), format!("{:.1}", 100.0 * rate)]);
            }
        }
        write_text(
            &out.join("bench_tests.csv"),
            &csv_table(&["model_a", "model_b", "alpha", "rejection_pct"], &rows),
        )?;
    }
    emit(&out, "bench", &args)
}
