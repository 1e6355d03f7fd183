//! Normalized-Laplacian spectral clustering of a similarity matrix.
//!
//! Pipeline: `Ŵ = exp(−ηÂ)` → `L̂ = I − D̂^{−1/2}ŴD̂^{−1/2}` → bottom `k`
//! eigenvectors → row normalization → k-means.

mod graph;
mod kmeans;
mod misclustering;
mod select;
mod validity;

use alloc::vec::Vec;

pub use self::graph::{
    adjacency, eigendecompose, embed, laplacian, AdjacencyMatrix, GraphLaplacian, SpectralEmbedding,
};
pub use self::kmeans::{kmeans, KMeansConfig, KMeansFit};
pub use self::misclustering::{misclustering_rate, Misclustering, EXHAUSTIVE_LIMIT};
pub use self::select::{choose_k_relgap, choose_k_sd1gap, select_k, KSelection, SelectionMethod, DEFAULT_K_MAX};
pub use self::validity::{ch_index, silhouette_index};

use crate::error::Result;
use crate::linalg::{Matrix, SymmetricEigen};
use crate::spectra::SimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    pub eta: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl ClusterConfig {
    pub const DEFAULT_ETA: f64 = 1.0;

    pub fn new(eta: f64, seed: u64) -> Self {
        Self {
            eta,
            restarts: KMeansConfig::DEFAULT_RESTARTS,
            seed,
        }
    }

    fn kmeans(&self) -> KMeansConfig {
        KMeansConfig {
            restarts: self.restarts,
            max_iter: KMeansConfig::DEFAULT_MAX_ITER,
            seed: self.seed,
        }
    }
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self::new(Self::DEFAULT_ETA, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutcome {
    /// Labels in `0..k`, every cluster nonempty.
    pub labels: Vec<usize>,
    /// `k × k` centroids in embedding space.
    pub centroids: Matrix,
    pub inertia: f64,
    pub chosen_k: usize,
    /// Full ascending Laplacian spectrum.
    pub eigenvalues: Vec<f64>,
    pub embedding: Matrix,
    pub degenerate_rows: Vec<usize>,
}

pub(crate) fn cluster_from_eigen(eigen: &SymmetricEigen, k: usize, config: &ClusterConfig) -> Result<ClusterOutcome> {
    let emb = embed(eigen, k)?;
    let fit = kmeans(&emb.rows, k, &config.kmeans())?;
    Ok(ClusterOutcome {
        labels: fit.labels,
        centroids: fit.centroids,
        inertia: fit.inertia,
        chosen_k: k,
        eigenvalues: eigen.values.clone(),
        embedding: emb.rows,
        degenerate_rows: emb.degenerate_rows,
    })
}

/// Full pipeline with a known number of clusters.
pub fn spectral_cluster_with(sim: &SimilarityMatrix, k: usize, config: &ClusterConfig) -> Result<ClusterOutcome> {
    let w = adjacency(sim, config.eta)?;
    let eigen = eigendecompose(&laplacian(&w)?)?;
    cluster_from_eigen(&eigen, k, config)
}

/// [`spectral_cluster_with`] using the default number of k-means restarts.
pub fn spectral_cluster(sim: &SimilarityMatrix, k: usize, eta: f64, seed: u64) -> Result<ClusterOutcome> {
    spectral_cluster_with(sim, k, &ClusterConfig::new(eta, seed))
}
