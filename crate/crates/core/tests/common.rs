#![allow(dead_code)]

use ftspec::spectra::BlockPlan;
use ftspec::{BasisSpec, FunctionalTimeSeries, Matrix};
use num_complex::Complex64;
use proptest::prelude::*;

pub fn series_from(t: usize, l: usize, values: Vec<f64>) -> FunctionalTimeSeries {
    let coeffs = Matrix::from_row_major(t, l, values).unwrap();
    FunctionalTimeSeries::new("x", coeffs, BasisSpec::fourier(l).unwrap()).unwrap()
}

/// `(T, M, L)` with `T ≤ 16`, `N = T/M` even.
pub fn small_shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (prop_oneof![Just((4, 1)), Just((4, 2)), Just((8, 1)), Just((8, 2)), Just((8, 4)), Just((12, 1)), Just((12, 2)), Just((12, 3)), Just((16, 2)), Just((16, 4)), Just((16, 8))], 1usize..=4)
        .prop_map(|((t, m), l)| (t, m, l))
}

/// Pair of random series of the given shape with entries in `[-2, 2]`, first one nonzero.
pub fn series_pair(t: usize, l: usize) -> impl Strategy<Value = (FunctionalTimeSeries, FunctionalTimeSeries)> {
    let cell = -2.0f64..2.0;
    (
        proptest::collection::vec(cell.clone(), t * l).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3)),
        proptest::collection::vec(cell, t * l),
    )
        .prop_map(move |(a, b)| (series_from(t, l, a), series_from(t, l, b)))
}

/// fDFT vectors straight from the defining sum, for every block and `k = 0..N−1`.
pub fn naive_fdft(x: &FunctionalTimeSeries, plan: &BlockPlan) -> Vec<Vec<Vec<Complex64>>> {
    let (t, m, n, l) = (plan.total_len(), plan.blocks(), plan.block_len(), x.dim());
    (1..=m)
        .map(|j| {
            // 1-based index of the first curve: ⌊u_j T⌋ − N/2 + 1
            let first = (2 * j - 1) * t / (2 * m) - n / 2 + 1;
            (0..n)
                .map(|k| {
                    let omega = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    (0..l)
                        .map(|c| {
                            let s: Complex64 = (0..n)
                                .map(|s| Complex64::from_polar(x.coeffs()[(first - 1 + s, c)], -omega * s as f64))
                                .sum();
                            s / (2.0 * std::f64::consts::PI * n as f64).sqrt()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `D D*` as a dense `L × L` complex matrix.
pub fn periodogram(d: &[Complex64]) -> Vec<Vec<Complex64>> {
    d.iter().map(|a| d.iter().map(|b| a * b.conj()).collect()).collect()
}

/// `trace(A B†)`.
pub fn hs(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Complex64 {
    let n = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[i][j] * b[i][j].conj();
        }
    }
    acc
}

/// `F_ab` with every local periodogram materialized.
pub fn dense_f(da: &[Vec<Vec<Complex64>>], db: &[Vec<Vec<Complex64>>], t: usize) -> f64 {
    let mut total = 0.0;
    for (ba, bb) in da.iter().zip(db) {
        let n = ba.len();
        for k in 1..=n / 2 {
            let v = hs(&periodogram(&ba[k]), &periodogram(&bb[k - 1]));
            assert!(v.im.abs() <= 1e-9 * (1.0 + v.re.abs()));
            total += v.re;
        }
    }
    total / t as f64
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
