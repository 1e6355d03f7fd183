use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::graph::AdjacencyMatrix;
use crate::error::{Error, Result};
use crate::spectra::SimilarityMatrix;

/// Number of clusters, after checking labels are `0..k` with no empty cluster.
fn cluster_count(labels: &[usize], d: usize) -> Result<usize> {
    if labels.len() != d {
        return Err(Error::Dimension {
            what: "labels vs matrix size",
            expected: d,
            found: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(Error::Parameter(format!("cluster {c} is empty")));
    }
    Ok(k)
}

/// Calinski–Harabasz index on the rows of `Ŵ` as feature vectors:
/// `[tr(B)/(k−1)] / [tr(W)/(d−k)]`. Returns `+∞` when the within-cluster
/// scatter vanishes but the between-cluster scatter does not.
pub fn ch_index(w: &AdjacencyMatrix, labels: &[usize]) -> Result<f64> {
    let d = w.len();
    let k = cluster_count(labels, d)?;
    if k < 2 || k >= d {
        return Err(Error::Parameter(format!(
            "Calinski-Harabasz needs 2 <= k < d, got k={k}, d={d}"
        )));
    }
    let x = w.weights();
    let p = x.ncols();
    let mut overall = vec![0.0; p];
    for row in x.rows() {
        for (o, v) in overall.iter_mut().zip(row) {
            *o += v;
        }
    }
    overall.iter_mut().for_each(|v| *v /= d as f64);

    let mut centroids = vec![vec![0.0; p]; k];
    let mut counts = vec![0usize; k];
    for (row, &c) in x.rows().zip(labels) {
        counts[c] += 1;
        for (o, v) in centroids[c].iter_mut().zip(row) {
            *o += v;
        }
    }
    for (cent, &n) in centroids.iter_mut().zip(&counts) {
        cent.iter_mut().for_each(|v| *v /= n as f64);
    }

    let between: f64 = centroids
        .iter()
        .zip(&counts)
        .map(|(c, &n)| n as f64 * c.iter().zip(&overall).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum();
    let within: f64 = x
        .rows()
        .zip(labels)
        .map(|(row, &c)| row.iter().zip(&centroids[c]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .sum();
    if within <= 0.0 {
        return Ok(if between > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok((between / (k - 1) as f64) / (within / (d - k) as f64))
}

/// Mean silhouette `(b − a)/max(a, b)` computed directly on `Â`.
///
/// Negative entries of `Â` are read as zero dissimilarity. Points in singleton
/// clusters score 0.
pub fn silhouette_index(sim: &SimilarityMatrix, labels: &[usize]) -> Result<f64> {
    let d = sim.len();
    let k = cluster_count(labels, d)?;
    if k < 2 {
        return Err(Error::Parameter("silhouette needs at least two clusters".into()));
    }
    let mut counts = vec![0usize; k];
    for &l in labels {
        counts[l] += 1;
    }
    let mut total = 0.0;
    let mut sums: Vec<f64> = vec![0.0; k];
    for i in 0..d {
        let own = labels[i];
        if counts[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..d {
            if j != i {
                sums[labels[j]] += sim.get(i, j).max(0.0);
            }
        }
        let a = sums[own] / (counts[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / d as f64)
}
