use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymmetricEigen};
use crate::spectra::SimilarityMatrix;

/// `Ŵ = exp(−η·Â)` entrywise; the diagonal is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyMatrix {
    weights: Matrix,
    eta: f64,
}

impl AdjacencyMatrix {
    /// Wraps a user-supplied weight matrix (e.g. loaded from disk).
    pub fn from_weights(weights: Matrix, eta: f64) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::Dimension {
                what: "adjacency must be square",
                expected: weights.nrows(),
                found: weights.ncols(),
            });
        }
        if !weights.all_finite() {
            return Err(Error::Numeric("non-finite adjacency weight"));
        }
        Ok(Self { weights, eta })
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn len(&self) -> usize {
        self.weights.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.weights.rows().map(|r| r.iter().sum()).collect()
    }
}

pub fn adjacency(sim: &SimilarityMatrix, eta: f64) -> Result<AdjacencyMatrix> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("scaling eta must be positive, got {eta}")));
    }
    let weights = sim.values().map(|a| libm::exp(-eta * a));
    Ok(AdjacencyMatrix { weights, eta })
}

/// Normalized Laplacian `I − D^{−1/2} W D^{−1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLaplacian {
    matrix: Matrix,
    degrees: Vec<f64>,
}

impl GraphLaplacian {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }
}

pub fn laplacian(w: &AdjacencyMatrix) -> Result<GraphLaplacian> {
    let degrees = w.degrees();
    if let Some(i) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::Graph(format!("vertex {i} has non-positive degree {}", degrees[i])));
    }
    let inv_sqrt: Vec<f64> = degrees.iter().map(|&d| 1.0 / libm::sqrt(d)).collect();
    let n = w.len();
    let raw = Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - inv_sqrt[i] * w.weights()[(i, j)] * inv_sqrt[j]
    });
    let matrix = Matrix::from_fn(n, n, |i, j| 0.5 * (raw[(i, j)] + raw[(j, i)]));
    Ok(GraphLaplacian { matrix, degrees })
}

/// Ascending eigenvalues with orthonormal eigenvectors (columns).
pub fn eigendecompose(l: &GraphLaplacian) -> Result<SymmetricEigen> {
    SymmetricEigen::new(l.matrix())
}

/// Rows of the first `k` eigenvectors, each normalized to unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    pub rows: Matrix,
    /// The `k` smallest eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Rows whose norm vanished; they are left at zero.
    pub degenerate_rows: Vec<usize>,
}

pub fn embed(eigen: &SymmetricEigen, k: usize) -> Result<SpectralEmbedding> {
    let d = eigen.values.len();
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("embedding dimension k={k} must lie in 1..={d}")));
    }
    let mut rows = Matrix::from_fn(d, k, |i, c| eigen.vectors[(i, c)]);
    let mut degenerate_rows = Vec::new();
    for i in 0..d {
        let row = rows.row_mut(i);
        let norm = libm::sqrt(row.iter().map(|x| x * x).sum::<f64>());
        if norm <= 1e-300 {
            row.iter_mut().for_each(|x| *x = 0.0);
            degenerate_rows.push(i);
        } else {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }
    Ok(SpectralEmbedding {
        rows,
        eigenvalues: eigen.values[..k].to_vec(),
        degenerate_rows,
    })
}
