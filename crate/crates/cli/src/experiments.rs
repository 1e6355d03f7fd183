//! Replicated simulation experiments behind `bench` and the acceptance run.
//!
//! Every replication derives its seeds from `(seed, replication index)`, and
//! results are collected in index order, so output does not depend on the
//! number of worker threads.

use std::fmt;
use std::str::FromStr;

use ftspec::cluster::{misclustering_rate, select_k, spectral_cluster_with, ClusterConfig, SelectionMethod};
use ftspec::equality::{equality_test_tables, NullVarianceEstimator};
use ftspec::models::{make_setting, simulate_model, ModelKind, ModelSpec};
use ftspec::rng::derive_seed;
use ftspec::spectra::{local_fdft, make_block_plan, similarity_from_tables, BlockPlan, LocalFdftTable};
use ftspec::{Error, FunctionalTimeSeries, Matrix, SimilarityMatrix};
use rayon::prelude::*;

/// All-pairs `Â`, with fDFT tables and pairs spread over the thread pool.
pub fn similarity_parallel(collection: &[FunctionalTimeSeries], plan: &BlockPlan) -> Result<SimilarityMatrix, Error> {
    if collection.len() < 2 {
        return Err(Error::Parameter("need at least two series".into()));
    }
    let tables = collection
        .par_iter()
        .map(|s| local_fdft(s, plan))
        .collect::<Result<Vec<LocalFdftTable>, Error>>()?;
    let d = collection.len();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| ((i + 1)..d).map(move |j| (i, j))).collect();
    let values = pairs
        .par_iter()
        .map(|&(i, j)| {
            similarity_from_tables(&tables[i], &tables[j]).map_err(|e| Error::Pair {
                first: collection[i].id().to_string(),
                second: collection[j].id().to_string(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    let mut m = Matrix::zeros(d, d);
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        m.row_mut(i)[j] = v;
        m.row_mut(j)[i] = v;
    }
    let ids = collection.iter().map(|s| s.id().to_string()).collect();
    SimilarityMatrix::new(ids, m, 0.0)
}

/// How `k` is fixed in a clustering benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    /// The number of generating models.
    Known,
    Select(SelectionMethod),
}

impl fmt::Display for KRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KRule::Known => f.write_str("true"),
            KRule::Select(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for KRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "true" | "known" => Ok(KRule::Known),
            other => other.parse().map(KRule::Select),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterScore {
    pub rule: KRule,
    pub eta: f64,
    pub k: usize,
    pub misclustering: f64,
}

/// Clusters one similarity matrix under each rule and compares with the truth.
pub fn score_rules(
    sim: &SimilarityMatrix,
    truth: &[usize],
    rules: &[KRule],
    eta: f64,
    k_max: usize,
    seed: u64,
) -> Result<Vec<ClusterScore>, Error> {
    let config = ClusterConfig::new(eta, seed);
    let k_true = truth.iter().max().map_or(1, |m| m + 1);
    rules
        .iter()
        .map(|&rule| {
            let k = match rule {
                KRule::Known => k_true,
                KRule::Select(method) => select_k(sim, method, k_max, &config)?.k,
            };
            let outcome = spectral_cluster_with(sim, k, &config)?;
            Ok(ClusterScore {
                rule,
                eta,
                k,
                misclustering: misclustering_rate(&outcome.labels, truth)?.rate,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SettingDesign {
    pub setting: u8,
    pub n: usize,
    pub t: usize,
    pub m: usize,
}

/// Similarity matrices and truth labels of `replications` independent draws of a setting.
pub fn setting_replicates(
    design: SettingDesign,
    replications: usize,
    seed: u64,
) -> Result<Vec<(SimilarityMatrix, Vec<usize>)>, Error> {
    let plan = make_block_plan(design.t, design.m)?;
    (0..replications)
        .into_par_iter()
        .map(|rep| {
            let data = make_setting(design.setting, design.n, design.t, derive_seed(seed, &[rep as u64, 0]))?;
            let sim = ftspec::spectra::similarity_matrix(&data.series, &plan)?;
            Ok((sim, data.labels))
        })
        .collect()
}

/// Scores of every rule and every `eta` for each replicate, in replicate order.
pub fn cluster_benchmark(
    replicates: &[(SimilarityMatrix, Vec<usize>)],
    rules: &[KRule],
    etas: &[f64],
    k_max: usize,
    seed: u64,
) -> Result<Vec<Vec<ClusterScore>>, Error> {
    replicates
        .par_iter()
        .enumerate()
        .map(|(rep, (sim, truth))| {
            let cluster_seed = derive_seed(seed, &[rep as u64, 1]);
            let mut scores = Vec::with_capacity(rules.len() * etas.len());
            for &eta in etas {
                scores.extend(score_rules(sim, truth, rules, eta, k_max, cluster_seed)?);
            }
            Ok(scores)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RejectionSummary {
    pub replications: usize,
    pub alphas: Vec<f64>,
    /// Rejection frequency per entry of `alphas`.
    pub rates: Vec<f64>,
    pub statistics: Vec<f64>,
    pub sigma2: Vec<f64>,
}

/// Repeated two-sample tests between independent draws of `a` and `b`.
#[allow(clippy::too_many_arguments)]
pub fn rejection_rates(
    a: ModelKind,
    b: ModelKind,
    t: usize,
    m: usize,
    replications: usize,
    alphas: &[f64],
    estimator: NullVarianceEstimator,
    seed: u64,
) -> Result<RejectionSummary, Error> {
    let plan = make_block_plan(t, m)?;
    let draws = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let x = simulate_model(&ModelSpec::new(a, t, derive_seed(seed, &[rep as u64, 0])))?;
            let y = simulate_model(&ModelSpec::new(b, t, derive_seed(seed, &[rep as u64, 1])))?;
            let r = equality_test_tables(&local_fdft(&x, &plan)?, &local_fdft(&y, &plan)?, 0.5, estimator)?;
            Ok((r.statistic, r.sigma2_hat, r.p_value))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let rates = alphas
        .iter()
        .map(|&alpha| draws.iter().filter(|d| d.2 < alpha).count() as f64 / replications as f64)
        .collect();
    Ok(RejectionSummary {
        replications,
        alphas: alphas.to_vec(),
        rates,
        statistics: draws.iter().map(|d| d.0).collect(),
        sigma2: draws.iter().map(|d| d.1).collect(),
    })
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
