use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest alphabet matched by exhaustive search over bijections.
pub const EXHAUSTIVE_LIMIT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Misclustering {
    /// Fraction of points whose label disagrees under the best matching.
    pub rate: f64,
    /// `false` when the alphabets were too large and greedy matching was used.
    pub exhaustive: bool,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut seen: Vec<usize> = Vec::new();
    let codes = labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect();
    (codes, seen.len())
}

/// Minimum disagreement fraction over all bijections between the two label alphabets.
pub fn misclustering_rate(labels: &[usize], truth: &[usize]) -> Result<Misclustering> {
    if labels.len() != truth.len() {
        return Err(Error::Dimension {
            what: "label vectors",
            expected: truth.len(),
            found: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::Parameter("empty labelling".into()));
    }
    let (a, ka) = compact(labels);
    let (b, kb) = compact(truth);
    let size = ka.max(kb);
    let mut table = vec![vec![0usize; size]; size];
    for (&x, &y) in a.iter().zip(&b) {
        table[x][y] += 1;
    }
    let (matched, exhaustive) = if size <= EXHAUSTIVE_LIMIT {
        (best_permutation(&table), true)
    } else {
        (greedy(&table), false)
    };
    Ok(Misclustering {
        rate: 1.0 - matched as f64 / labels.len() as f64,
        exhaustive,
    })
}

fn best_permutation(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let score = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| table[i][j]).sum::<usize>();
    let mut best = score(&perm);
    // Heap's algorithm, iterative form.
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(score(&perm));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    best
}

fn greedy(table: &[Vec<usize>]) -> usize {
    let n = table.len();
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    let mut total = 0;
    for _ in 0..n {
        let mut best = None;
        for (i, row) in table.iter().enumerate() {
            if row_used[i] {
                continue;
            }
            for (j, &v) in row.iter().enumerate() {
                if !col_used[j] && best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((i, j, v));
                }
            }
        }
        if let Some((i, j, v)) = best {
            row_used[i] = true;
            col_used[j] = true;
            total += v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_relabelled() {
        let truth = [0, 0, 1, 1, 2, 2];
        assert_eq!(misclustering_rate(&truth, &truth).unwrap().rate, 0.0);
        let relabelled = [2, 2, 0, 0, 1, 1];
        assert_eq!(misclustering_rate(&relabelled, &truth).unwrap().rate, 0.0);
    }

    #[test]
    fn one_flip_in_ten() {
        let truth = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let mut labels = truth;
        labels[3] = 1;
        let m = misclustering_rate(&labels, &truth).unwrap();
        assert!((m.rate - 0.1).abs() < 1e-15);
        assert!(m.exhaustive);
    }

    #[test]
    fn different_alphabet_sizes() {
        let truth = [0, 0, 0, 1, 1, 1];
        let labels = [0, 0, 0, 0, 0, 0];
        assert!((misclustering_rate(&labels, &truth).unwrap().rate - 0.5).abs() < 1e-15);
        assert!((misclustering_rate(&truth, &labels).unwrap().rate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn greedy_fallback_beyond_eight_labels() {
        let truth: Vec<usize> = (0..20).map(|i| i / 2).collect();
        let labels: Vec<usize> = truth.iter().map(|&t| 9 - t).collect();
        let m = misclustering_rate(&labels, &truth).unwrap();
        assert!(!m.exhaustive);
        assert_eq!(m.rate, 0.0);
    }

    #[test]
    fn length_mismatch() {
        assert!(misclustering_rate(&[0, 1], &[0]).is_err());
    }
}
