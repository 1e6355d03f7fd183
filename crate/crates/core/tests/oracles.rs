#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use ftspec::equality::{pooled_sigma2_with, NullVarianceEstimator};
use ftspec::spectra::{f_stat, local_fdft, make_block_plan, similarity, similarity_matrix};
use num_complex::Complex64;
use proptest::prelude::*;

fn dense_sigma2(da: &[Vec<Vec<Complex64>>], db: &[Vec<Vec<Complex64>>], t: usize, est: NullVarianceEstimator) -> f64 {
    // Pooled terms ⟨I_p^k, I_p^{k−1}⟩ from materialized (I_a + I_b)/2.
    let pooled = |j: usize, k: usize| {
        let pa = periodogram(&da[j][k]);
        let pb = periodogram(&db[j][k]);
        pa.iter().zip(&pb).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| 0.5 * (x + y)).collect()).collect::<Vec<Vec<_>>>()
    };
    let rows: Vec<Vec<f64>> = (0..da.len())
        .map(|j| {
            let n = da[j].len();
            (1..=n / 2).map(|k| hs(&pooled(j, k), &pooled(j, k - 1)).re).collect()
        })
        .collect();
    let t = t as f64;
    let s1: f64 = rows.iter().flatten().sum::<f64>() / t;
    match est {
        NullVarianceEstimator::Squared => {
            let s2: f64 = rows.iter().flatten().map(|h| h * h).sum::<f64>() * 2.0 / (3.0 * t);
            s2 / (2.0 * s1).powi(2)
        }
        NullVarianceEstimator::Decoupled => {
            let nk = rows[0].len() as f64;
            let prod: f64 = rows.iter().map(|r| (0..r.len() - 2).map(|k| r[k] * r[k + 2]).sum::<f64>()).sum();
            prod / t * nk / (nk - 2.0) / (s1 * s1)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_f_stats_match_dense_tensors(((t, m, l), (a, b)) in small_shape().prop_flat_map(|s| (Just(s), series_pair(s.0, s.2)))) {
        let plan = make_block_plan(t, m).unwrap();
        let (ta, tb) = (local_fdft(&a, &plan).unwrap(), local_fdft(&b, &plan).unwrap());
        let (na, nb) = (naive_fdft(&a, &plan), naive_fdft(&b, &plan));
        for (x, y, nx, ny) in [(&ta, &tb, &na, &nb), (&tb, &ta, &nb, &na), (&ta, &ta, &na, &na), (&tb, &tb, &nb, &nb)] {
            let fast = f_stat(x, y).unwrap();
            let dense = dense_f(nx, ny, t);
            prop_assert!(fast >= 0.0);
            prop_assert!((fast - dense).abs() <= 1e-10 * dense.abs().max(1e-12), "fast {fast} dense {dense}");
        }
        let _ = l;
    }

    #[test]
    fn table_matches_naive_transform(((t, m, l), (a, _)) in small_shape().prop_flat_map(|s| (Just(s), series_pair(s.0, s.2)))) {
        let plan = make_block_plan(t, m).unwrap();
        let table = local_fdft(&a, &plan).unwrap();
        let naive = naive_fdft(&a, &plan);
        for j in 0..m {
            for k in 0..plan.frequency_count() {
                for c in 0..l {
                    prop_assert!((table.get(j, k)[c] - naive[j][k][c]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pooled_variance_matches_dense_tensors(l in 1usize..=3, m in 1usize..=2, seed in proptest::collection::vec(-1.0f64..1.0, 2 * 24 * 3)) {
        let t = 12 * m;
        let a = series_from(t, l, seed[..t * l].to_vec());
        let b = series_from(t, l, seed[t * l..2 * t * l].to_vec());
        let plan = make_block_plan(t, m).unwrap();
        let (ta, tb) = (local_fdft(&a, &plan).unwrap(), local_fdft(&b, &plan).unwrap());
        let (na, nb) = (naive_fdft(&a, &plan), naive_fdft(&b, &plan));
        for est in [NullVarianceEstimator::Decoupled, NullVarianceEstimator::Squared] {
            let fast = pooled_sigma2_with(&ta, &tb, est).unwrap();
            let dense = dense_sigma2(&na, &nb, t, est);
            prop_assert!(rel_close(fast, dense, 1e-10), "{est:?}: fast {fast} dense {dense}");
        }
    }

    #[test]
    fn parseval_per_block((t, m, l) in small_shape(), values in proptest::collection::vec(-3.0f64..3.0, 16 * 4)) {
        let x = series_from(t, l, values[..t * l].to_vec());
        let plan = make_block_plan(t, m).unwrap();
        let table = local_fdft(&x, &plan).unwrap();
        let n = plan.block_len();
        for j in 0..m {
            let energy: f64 = plan.block_range(j + 1).map(|r| x.coeffs().row(r).iter().map(|v| v * v).sum::<f64>()).sum();
            // Real input: D^{N−k} = conj(D^k), so interior frequencies count twice.
            let norm2 = |k: usize| table.get(j, k).iter().map(|z| z.norm_sqr()).sum::<f64>();
            let full: f64 = norm2(0) + norm2(n / 2) + 2.0 * (1..n / 2).map(norm2).sum::<f64>();
            let expected = energy / (2.0 * std::f64::consts::PI);
            prop_assert!((full - expected).abs() <= 1e-10 * expected.max(1e-300) + 1e-15);
        }
    }
}

#[test]
fn scaled_copies_in_a_matrix() {
    let x = series_from(32, 3, (0..96).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect());
    let plan = make_block_plan(32, 4).unwrap();
    let sim = similarity_matrix(&[x.clone(), x.scaled(2.0)], &plan).unwrap();
    assert!((sim.get(0, 1) - 9.0 / 17.0).abs() < 1e-12);
    for c in [0.5f64, 3.0, -2.0] {
        let expected = (1.0 - c * c) * (1.0 - c * c) / (1.0 + c.powi(4));
        assert!(rel_close(similarity(&x, &x.scaled(c), &plan).unwrap(), expected, 1e-10));
    }
}
