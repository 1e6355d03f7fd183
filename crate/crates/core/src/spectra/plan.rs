use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Factorization `T = M·N` into `M` blocks of even length `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockPlan {
    t: usize,
    m: usize,
    n: usize,
}

impl BlockPlan {
    /// Series length `T`.
    pub fn total_len(&self) -> usize {
        self.t
    }

    /// Number of blocks `M`.
    pub fn blocks(&self) -> usize {
        self.m
    }

    /// Block length `N`.
    pub fn block_len(&self) -> usize {
        self.n
    }

    /// Number of stored frequencies, `⌊N/2⌋ + 1`.
    pub fn frequency_count(&self) -> usize {
        self.n / 2 + 1
    }

    /// Rescaled block midpoint `u_j = (2j−1)/(2M)` for 1-based `j`.
    pub fn midpoint(&self, j: usize) -> f64 {
        (2 * j - 1) as f64 / (2 * self.m) as f64
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (1..=self.m).map(|j| self.midpoint(j)).collect()
    }

    /// Fourier frequency `ω_k = 2πk/N`.
    pub fn frequency(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n as f64
    }

    /// 0-based sample range of block `j` (1-based), i.e. the curves
    /// `X_{⌊u_j T⌋ − N/2 + s + 1}` for `s = 0..N−1`.
    pub fn block_range(&self, j: usize) -> core::ops::Range<usize> {
        // ⌊u_j T⌋ = (2j−1)N/2 exactly, since T = MN with N even.
        let centre = (2 * j - 1) * self.n / 2;
        let start = centre - self.n / 2;
        start..start + self.n
    }
}

fn is_valid(t: usize, m: usize) -> bool {
    m >= 1 && t.is_multiple_of(m) && (t / m).is_multiple_of(2)
}

fn nearest_valid(t: usize, m: usize) -> Option<usize> {
    (1..=t)
        .filter(|&c| is_valid(t, c))
        .min_by_key(|&c| (c.abs_diff(m), c))
}

pub fn make_block_plan(t: usize, m: usize) -> Result<BlockPlan> {
    let reason = if m == 0 {
        Some("M must be positive")
    } else if !t.is_multiple_of(m) {
        Some("T is not divisible by M")
    } else if !(t / m).is_multiple_of(2) {
        Some("block length N = T/M must be even")
    } else {
        None
    };
    if let Some(reason) = reason {
        return Err(Error::Plan {
            t,
            m,
            reason,
            suggestion: nearest_valid(t, m),
        });
    }
    Ok(BlockPlan { t, m, n: t / m })
}

/// Block count giving blocks of 32 curves, when `T` is a multiple of 32.
pub fn default_block_count(t: usize) -> Option<usize> {
    (t.is_multiple_of(32) && t > 0).then_some(t / 32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simulation_plan() {
        let plan = make_block_plan(512, 16).unwrap();
        assert_eq!(plan.block_len(), 32);
        assert!((plan.midpoint(1) - 1.0 / 32.0).abs() < 1e-15);
        assert!((plan.frequency(1) - PI / 16.0).abs() < 1e-15);
        assert_eq!(plan.frequency_count(), 17);
    }

    #[test]
    fn small_plan_midpoints() {
        let plan = make_block_plan(12, 3).unwrap();
        assert_eq!(plan.block_len(), 4);
        let u = plan.midpoints();
        for (got, want) in u.iter().zip([1.0 / 6.0, 0.5, 5.0 / 6.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn blocks_tile_the_sample() {
        for (t, m) in [(12, 3), (512, 16), (256, 8), (1288, 14), (64, 1)] {
            let plan = make_block_plan(t, m).unwrap();
            for j in 1..=m {
                assert_eq!(plan.block_range(j), (j - 1) * plan.block_len()..j * plan.block_len());
            }
        }
    }

    #[test]
    fn invalid_plans() {
        match make_block_plan(33, 8) {
            Err(Error::Plan { reason, .. }) => assert!(reason.contains("divisible")),
            other => panic!("{other:?}"),
        }
        match make_block_plan(24, 8) {
            Err(Error::Plan { suggestion, .. }) => assert_eq!(suggestion, Some(6)),
            other => panic!("{other:?}"),
        }
        assert!(make_block_plan(10, 0).is_err());
    }

    #[test]
    fn default_blocks() {
        assert_eq!(default_block_count(256), Some(8));
        assert_eq!(default_block_count(512), Some(16));
        assert_eq!(default_block_count(100), None);
    }
}
