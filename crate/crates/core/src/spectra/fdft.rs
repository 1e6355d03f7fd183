use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::plan::BlockPlan;
use crate::error::{Error, Result};
use crate::series::FunctionalTimeSeries;

/// Coefficient vectors of the local fDFT `D^{u_j, ω_k}` for every block `j`
/// and `k = 0..⌊N/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFdftTable {
    plan: BlockPlan,
    dim: usize,
    values: Vec<Complex64>,
}

impl LocalFdftTable {
    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `D^{u_j, ω_k}` for 0-based block `j`.
    #[inline]
    pub fn get(&self, j: usize, k: usize) -> &[Complex64] {
        let nf = self.plan.frequency_count();
        let start = (j * nf + k) * self.dim;
        &self.values[start..start + self.dim]
    }

    /// Same table with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            plan: self.plan,
            dim: self.dim,
            values: self.values.iter().map(|z| z * factor).collect(),
        }
    }
}

/// `D^{u,ω} = (2πN)^{−1/2} Σ_{s=0}^{N−1} X_{⌊uT⌋−N/2+s+1} e^{−iωs}`, computed per
/// coefficient column as a length-`N` DFT of the block.
pub fn local_fdft(series: &FunctionalTimeSeries, plan: &BlockPlan) -> Result<LocalFdftTable> {
    if series.len() != plan.total_len() {
        return Err(Error::Dimension {
            what: "series length vs block plan",
            expected: plan.total_len(),
            found: series.len(),
        });
    }
    let n = plan.block_len();
    let nf = plan.frequency_count();
    let dim = series.dim();
    let norm = 1.0 / libm::sqrt(2.0 * PI * n as f64);
    // e^{-2πi r/N}, r = ks mod N
    let twiddle: Vec<Complex64> = (0..n)
        .map(|r| {
            let angle = -2.0 * PI * r as f64 / n as f64;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect();

    let coeffs = series.coeffs();
    let mut values = vec![Complex64::new(0.0, 0.0); plan.blocks() * nf * dim];
    for j in 0..plan.blocks() {
        let range = plan.block_range(j + 1);
        for k in 0..nf {
            let out = &mut values[(j * nf + k) * dim..(j * nf + k + 1) * dim];
            for (s, t) in range.clone().enumerate() {
                let w = twiddle[(k * s) % n];
                for (o, &x) in out.iter_mut().zip(coeffs.row(t)) {
                    o.re += x * w.re;
                    o.im += x * w.im;
                }
            }
            for o in out.iter_mut() {
                *o *= norm;
            }
        }
    }
    Ok(LocalFdftTable {
        plan: *plan,
        dim,
        values,
    })
}
