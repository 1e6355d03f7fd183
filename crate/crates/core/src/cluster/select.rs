use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::graph::{adjacency, eigendecompose, laplacian};
use super::validity::{ch_index, silhouette_index};
use super::{cluster_from_eigen, ClusterConfig};
use crate::error::{Error, Result};
use crate::spectra::SimilarityMatrix;

/// Default upper bound on the number of clusters considered.
pub const DEFAULT_K_MAX: usize = 15;

/// Eigenvalues at or below this are treated as exact zeros by the relative-gap rule.
const ZERO_EIGENVALUE: f64 = 1e-12;

/// Relative-gap rule: `ρ_k = (λ_k − λ_{k−1})/λ_k`,
/// `k* = max{k ≤ k_max : ρ_k ≤ 0.01·η}`.
///
/// `ρ_1` and every `ρ_k` with `λ_k ≤ 1e-12` are defined as 0.
pub fn choose_k_relgap(eigenvalues: &[f64], eta: f64, k_max: usize) -> Result<usize> {
    if eigenvalues.is_empty() {
        return Err(Error::Parameter("relgap needs at least one eigenvalue".into()));
    }
    if k_max == 0 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    let threshold = 0.01 * eta;
    let upper = k_max.min(eigenvalues.len());
    let mut best = 1;
    for k in 2..=upper {
        let (prev, cur) = (eigenvalues[k - 2], eigenvalues[k - 1]);
        let rho = if cur <= ZERO_EIGENVALUE { 0.0 } else { (cur - prev) / cur };
        if rho <= threshold {
            best = k;
        }
    }
    Ok(best)
}

/// Gap-versus-spread rule: `k* = max{k ≤ k_max : λ_{k+1} − λ_k ≥ σ_k}` with `σ_k`
/// the mean squared deviation of `λ_{k+1}, …, λ_d`.
pub fn choose_k_sd1gap(eigenvalues: &[f64], k_max: usize) -> Result<usize> {
    let d = eigenvalues.len();
    if k_max == 0 || k_max >= d {
        return Err(Error::Parameter(format!(
            "sd1gap needs 1 <= k_max < d, got k_max={k_max}, d={d}"
        )));
    }
    let mut best = 1;
    for k in 1..=k_max {
        let tail = &eigenvalues[k..];
        // Shifted by the first tail value so equal eigenvalues give exactly zero.
        let n = tail.len() as f64;
        let shift = tail[0];
        let mean = tail.iter().map(|x| x - shift).sum::<f64>() / n;
        let spread = tail.iter().map(|x| (x - shift - mean) * (x - shift - mean)).sum::<f64>() / n;
        if eigenvalues[k] - eigenvalues[k - 1] >= spread {
            best = k;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMethod {
    Relgap,
    Sd1gap,
    Ch,
    Silhouette,
}

impl SelectionMethod {
    pub const ALL: [SelectionMethod; 4] = [
        SelectionMethod::Relgap,
        SelectionMethod::Sd1gap,
        SelectionMethod::Ch,
        SelectionMethod::Silhouette,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SelectionMethod::Relgap => "relgap",
            SelectionMethod::Sd1gap => "sd1gap",
            SelectionMethod::Ch => "ch",
            SelectionMethod::Silhouette => "silhouette",
        }
    }
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relgap" => Ok(SelectionMethod::Relgap),
            "sd1gap" => Ok(SelectionMethod::Sd1gap),
            "ch" => Ok(SelectionMethod::Ch),
            "sil" | "silhouette" => Ok(SelectionMethod::Silhouette),
            other => Err(Error::Parameter(format!(
                "unknown k-selection method '{other}' (expected relgap, sd1gap, ch or silhouette)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSelection {
    pub method: SelectionMethod,
    pub k: usize,
    /// `(k, index value)` for each candidate, index methods only.
    pub scores: Vec<(usize, f64)>,
    /// Ascending Laplacian spectrum.
    pub eigenvalues: Vec<f64>,
}

/// Data-driven choice of `k`.
///
/// Index methods cluster for every `k = 2..=min(k_max, d−1)` and keep the
/// maximizer (first on ties); eigenvalue methods read the Laplacian spectrum.
pub fn select_k(
    sim: &SimilarityMatrix,
    method: SelectionMethod,
    k_max: usize,
    config: &ClusterConfig,
) -> Result<KSelection> {
    let d = sim.len();
    let w = adjacency(sim, config.eta)?;
    let eigen = eigendecompose(&laplacian(&w)?)?;
    let eigenvalues = eigen.values.clone();
    let (k, scores) = match method {
        SelectionMethod::Relgap => (choose_k_relgap(&eigenvalues, config.eta, k_max)?, Vec::new()),
        SelectionMethod::Sd1gap => (choose_k_sd1gap(&eigenvalues, k_max.min(d.saturating_sub(1)))?, Vec::new()),
        SelectionMethod::Ch | SelectionMethod::Silhouette => {
            let upper = k_max.min(d.saturating_sub(1));
            if upper < 2 {
                return Err(Error::Parameter(format!(
                    "index-based selection needs d >= 3 and k_max >= 2 (d={d}, k_max={k_max})"
                )));
            }
            let mut scores = Vec::with_capacity(upper - 1);
            for k in 2..=upper {
                let outcome = cluster_from_eigen(&eigen, k, config)?;
                let score = match method {
                    SelectionMethod::Ch => ch_index(&w, &outcome.labels)?,
                    _ => silhouette_index(sim, &outcome.labels)?,
                };
                scores.push((k, score));
            }
            let best = scores
                .iter()
                .fold(None::<(usize, f64)>, |acc, &(k, s)| match acc {
                    Some((_, b)) if s.partial_cmp(&b) != Some(core::cmp::Ordering::Greater) => acc,
                    _ => Some((k, s)),
                })
                .map_or(2, |(k, _)| k);
            (best, scores)
        }
    };
    Ok(KSelection {
        method,
        k,
        scores,
        eigenvalues,
    })
}
