use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rng::{child_rng, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl KMeansConfig {
    pub const DEFAULT_RESTARTS: usize = 25;
    pub const DEFAULT_MAX_ITER: usize = 100;

    pub fn with_seed(seed: u64) -> Self {
        Self {
            restarts: Self::DEFAULT_RESTARTS,
            max_iter: Self::DEFAULT_MAX_ITER,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    /// `k × p` centroid matrix.
    pub centroids: Matrix,
    /// `Σ_i ‖x_i − centroid(label_i)‖²`.
    pub inertia: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations from k-means++ seeding, best of `restarts` runs by inertia.
///
/// Restart `r` draws from a stream derived from `(seed, k, r)`. Assignment ties
/// go to the lowest cluster index; an empty cluster takes the point farthest
/// from its current centroid (lowest index on ties).
pub fn kmeans(points: &Matrix, k: usize, config: &KMeansConfig) -> Result<KMeansFit> {
    let d = points.nrows();
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("k={k} must lie in 1..={d}")));
    }
    if config.restarts == 0 {
        return Err(Error::Parameter("k-means needs at least one restart".into()));
    }
    if !points.all_finite() {
        return Err(Error::Numeric("non-finite point passed to k-means"));
    }
    let mut best: Option<KMeansFit> = None;
    for r in 0..config.restarts {
        let mut rng = child_rng(config.seed, &[k as u64, r as u64]);
        let fit = lloyd(points, seed_centroids(points, k, &mut rng), config.max_iter);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn seed_centroids(points: &Matrix, k: usize, rng: &mut Rng) -> Matrix {
    let d = points.nrows();
    let mut centroids = Matrix::zeros(k, points.ncols());
    let first = rng.random_range(0..d);
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut nearest: Vec<f64> = (0..d).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &w) in nearest.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    chosen = Some(i);
                    break;
                }
            }
            chosen.unwrap_or_else(|| nearest.iter().rposition(|&w| w > 0.0).unwrap_or(0))
        } else {
            rng.random_range(0..d)
        };
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        for (i, n) in nearest.iter_mut().enumerate() {
            *n = n.min(sq_dist(points.row(i), points.row(pick)));
        }
    }
    centroids
}

fn assign(points: &Matrix, centroids: &Matrix, labels: &mut [usize]) {
    for (i, label) in labels.iter_mut().enumerate() {
        let p = points.row(i);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..centroids.nrows() {
            let dist = sq_dist(p, centroids.row(c));
            if dist < best_d {
                best_d = dist;
                best = c;
            }
        }
        *label = best;
    }
}

fn means(points: &Matrix, labels: &[usize], k: usize) -> Matrix {
    let mut centroids = Matrix::zeros(k, points.ncols());
    let mut counts = vec![0usize; k];
    for (i, &c) in labels.iter().enumerate() {
        counts[c] += 1;
        for (o, x) in centroids.row_mut(c).iter_mut().zip(points.row(i)) {
            *o += x;
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        if n > 0 {
            centroids.row_mut(c).iter_mut().for_each(|x| *x /= n as f64);
        }
    }
    centroids
}

/// Moves far points into empty clusters until every cluster has a member.
fn repair_empty(points: &Matrix, labels: &mut [usize], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        for &c in labels.iter() {
            counts[c] += 1;
        }
        let Some(empty) = counts.iter().position(|&n| n == 0) else {
            return;
        };
        let centroids = means(points, labels, k);
        let mut pick = None;
        let mut pick_d = -1.0;
        for (i, &c) in labels.iter().enumerate() {
            if counts[c] < 2 {
                continue;
            }
            let dist = sq_dist(points.row(i), centroids.row(c));
            if dist > pick_d {
                pick_d = dist;
                pick = Some(i);
            }
        }
        match pick {
            Some(i) => labels[i] = empty,
            None => return,
        }
    }
}

fn lloyd(points: &Matrix, mut centroids: Matrix, max_iter: usize) -> KMeansFit {
    let d = points.nrows();
    let k = centroids.nrows();
    let mut labels = vec![usize::MAX; d];
    let mut next = vec![0usize; d];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        assign(points, &centroids, &mut next);
        repair_empty(points, &mut next, k);
        centroids = means(points, &next, k);
        if next == labels {
            converged = true;
            break;
        }
        labels.copy_from_slice(&next);
    }
    let inertia = labels
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(points.row(i), centroids.row(c)))
        .sum();
    KMeansFit {
        labels,
        centroids,
        inertia,
        iterations,
        converged,
    }
}
