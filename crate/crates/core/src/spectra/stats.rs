use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::fdft::{local_fdft, LocalFdftTable};
use super::plan::BlockPlan;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::series::{inner, FunctionalTimeSeries};
use crate::sum::CompensatedSum;

fn check_compatible(a: &LocalFdftTable, b: &LocalFdftTable) -> Result<()> {
    if a.plan() != b.plan() {
        return Err(Error::Dimension {
            what: "fDFT tables built on different block plans",
            expected: a.plan().total_len(),
            found: b.plan().total_len(),
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            what: "fDFT basis dimension",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `⟨I_a^{u_j,ω_k}, I_b^{u_j,ω_{k−1}}⟩_HS = |⟨D_a^{u_j,ω_k}, D_b^{u_j,ω_{k−1}}⟩|²`
/// for every block `j` and `k = 1..⌊N/2⌋`, block-major.
///
/// Uses the rank-one identity `⟨a⊗a, b⊗b⟩_HS = ⟨a,b⟩·conj(⟨a,b⟩)`, so no
/// `L × L` periodogram matrix is ever formed.
pub fn hs_lag_terms<'a>(
    a: &'a LocalFdftTable,
    b: &'a LocalFdftTable,
) -> Result<impl Iterator<Item = f64> + 'a> {
    check_compatible(a, b)?;
    let plan = *a.plan();
    let nf = plan.frequency_count();
    Ok((0..plan.blocks()).flat_map(move |j| {
        (1..nf).map(move |k| inner(a.get(j, k), b.get(j, k - 1)).norm_sqr())
    }))
}

/// `F_ab = T^{−1} Σ_{j=1}^{M} Σ_{k=1}^{⌊N/2⌋} ⟨I_a^{u_j,ω_k}, I_b^{u_j,ω_{k−1}}⟩_HS`.
pub fn f_stat(a: &LocalFdftTable, b: &LocalFdftTable) -> Result<f64> {
    let total: CompensatedSum = hs_lag_terms(a, b)?.collect();
    Ok(total.value() / a.plan().total_len() as f64)
}

/// The four F-statistics entering `Â` for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FStatBundle {
    pub f11: f64,
    pub f22: f64,
    pub f12: f64,
    pub f21: f64,
}

impl FStatBundle {
    pub fn from_tables(a: &LocalFdftTable, b: &LocalFdftTable) -> Result<Self> {
        Ok(Self {
            f11: f_stat(a, a)?,
            f22: f_stat(b, b)?,
            f12: f_stat(a, b)?,
            f21: f_stat(b, a)?,
        })
    }

    /// `Â = (F11 + F22 − F12 − F21) / (F11 + F22)`.
    pub fn similarity(&self) -> Result<f64> {
        let denom = self.f11 + self.f22;
        if denom <= 0.0 {
            return Err(Error::Degenerate("both series have zero local periodogram energy"));
        }
        Ok(((self.f11 + self.f22) - (self.f12 + self.f21)) / denom)
    }
}

pub fn similarity_from_tables(a: &LocalFdftTable, b: &LocalFdftTable) -> Result<f64> {
    FStatBundle::from_tables(a, b)?.similarity()
}

/// Estimated normalized Hilbert–Schmidt distance `Â` between two series.
pub fn similarity(a: &FunctionalTimeSeries, b: &FunctionalTimeSeries, plan: &BlockPlan) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension {
            what: "basis dimension of compared series",
            expected: a.dim(),
            found: b.dim(),
        });
    }
    similarity_from_tables(&local_fdft(a, plan)?, &local_fdft(b, plan)?)
}

/// Symmetric `d × d` matrix of pairwise `Â` with zero diagonal.
///
/// Entries are stored raw; small negative values occur in finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    ids: Vec<String>,
    values: Matrix,
}

impl SimilarityMatrix {
    /// Validates squareness, symmetry within `tol`, finiteness and the id count,
    /// then symmetrizes and zeroes the diagonal.
    pub fn new(ids: Vec<String>, values: Matrix, tol: f64) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::Dimension {
                what: "similarity matrix must be square",
                expected: values.nrows(),
                found: values.ncols(),
            });
        }
        if ids.len() != values.nrows() {
            return Err(Error::Dimension {
                what: "series ids vs similarity rows",
                expected: values.nrows(),
                found: ids.len(),
            });
        }
        if !values.all_finite() {
            return Err(Error::Numeric("non-finite similarity entry"));
        }
        let asym = values.max_asymmetry();
        if asym > tol {
            return Err(Error::Parameter(format!(
                "similarity matrix asymmetric by {asym:e} (tolerance {tol:e})"
            )));
        }
        let d = values.nrows();
        let values = Matrix::from_fn(d, d, |i, j| {
            if i == j {
                0.0
            } else {
                0.5 * (values[(i, j)] + values[(j, i)])
            }
        });
        Ok(Self { ids, values })
    }

    pub(crate) fn from_parts_unchecked(ids: Vec<String>, values: Matrix) -> Self {
        Self { ids, values }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Rows and columns reordered by `order` (e.g. grouped by cluster label).
    pub fn permuted(&self, order: &[usize]) -> Self {
        let ids = order.iter().map(|&i| self.ids[i].clone()).collect();
        let values = Matrix::from_fn(order.len(), order.len(), |r, c| self.values[(order[r], order[c])]);
        Self { ids, values }
    }
}

fn check_collection(collection: &[FunctionalTimeSeries]) -> Result<()> {
    if collection.len() < 2 {
        return Err(Error::Parameter("need at least two series".into()));
    }
    let (t, l) = (collection[0].len(), collection[0].dim());
    for s in collection {
        if s.len() != t {
            return Err(Error::Dimension {
                what: "series length within collection",
                expected: t,
                found: s.len(),
            });
        }
        if s.dim() != l {
            return Err(Error::Dimension {
                what: "basis dimension within collection",
                expected: l,
                found: s.dim(),
            });
        }
    }
    Ok(())
}

/// Pairwise `Â` over precomputed tables.
pub fn similarity_matrix_from_tables(ids: Vec<String>, tables: &[LocalFdftTable]) -> Result<SimilarityMatrix> {
    let d = tables.len();
    let mut values = Matrix::zeros(d, d);
    for i in 0..d {
        for j in (i + 1)..d {
            let a = similarity_from_tables(&tables[i], &tables[j]).map_err(|e| pair_error(&ids, i, j, e))?;
            values[(i, j)] = a;
            values[(j, i)] = a;
        }
    }
    Ok(SimilarityMatrix::from_parts_unchecked(ids, values))
}

pub(crate) fn pair_error(ids: &[String], i: usize, j: usize, e: Error) -> Error {
    Error::Pair {
        first: ids[i].clone(),
        second: ids[j].clone(),
        source: alloc::boxed::Box::new(e),
    }
}

/// Computes each series' fDFT table once, then every pair.
pub fn similarity_matrix(collection: &[FunctionalTimeSeries], plan: &BlockPlan) -> Result<SimilarityMatrix> {
    check_collection(collection)?;
    let tables = collection
        .iter()
        .map(|s| local_fdft(s, plan))
        .collect::<Result<Vec<_>>>()?;
    let ids = collection.iter().map(|s| String::from(s.id())).collect();
    similarity_matrix_from_tables(ids, &tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::BasisSpec;
    use crate::spectra::make_block_plan;

    fn lcg_series(t: usize, l: usize, seed: u64) -> FunctionalTimeSeries {
        let mut state = seed;
        let coeffs = Matrix::from_fn(t, l, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        });
        FunctionalTimeSeries::new("s", coeffs, BasisSpec::fourier(l).unwrap()).unwrap()
    }

    #[test]
    fn self_similarity_is_zero() {
        let x = lcg_series(64, 5, 3);
        let plan = make_block_plan(64, 4).unwrap();
        assert_eq!(similarity(&x, &x, &plan).unwrap(), 0.0);
    }

    #[test]
    fn scaled_copy_closed_form() {
        let x = lcg_series(64, 5, 11);
        let plan = make_block_plan(64, 4).unwrap();
        let a = similarity(&x, &x.scaled(2.0), &plan).unwrap();
        assert!((a - 9.0 / 17.0).abs() < 1e-12);
    }

    #[test]
    fn zero_series_is_degenerate() {
        let z = FunctionalTimeSeries::new("z", Matrix::zeros(16, 2), BasisSpec::fourier(2).unwrap()).unwrap();
        let plan = make_block_plan(16, 2).unwrap();
        assert!(matches!(similarity(&z, &z, &plan), Err(Error::Degenerate(_))));
        let table = local_fdft(&z, &plan).unwrap();
        assert_eq!(f_stat(&table, &table).unwrap(), 0.0);
    }

    #[test]
    fn plan_mismatch() {
        let x = lcg_series(32, 2, 1);
        let a = local_fdft(&x, &make_block_plan(32, 2).unwrap()).unwrap();
        let b = local_fdft(&x, &make_block_plan(32, 4).unwrap()).unwrap();
        assert!(matches!(f_stat(&a, &b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn matrix_of_copies_is_zero() {
        let x = lcg_series(32, 3, 5);
        let plan = make_block_plan(32, 2).unwrap();
        let sim = similarity_matrix(&[x.clone(), x.clone(), x], &plan).unwrap();
        assert!(sim.values().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matrix_is_exactly_symmetric() {
        let xs: Vec<_> = (0..5).map(|i| lcg_series(32, 3, 100 + i)).collect();
        let sim = similarity_matrix(&xs, &make_block_plan(32, 2).unwrap()).unwrap();
        assert_eq!(sim.values().max_asymmetry(), 0.0);
        assert!((0..5).all(|i| sim.get(i, i) == 0.0));
    }

    #[test]
    fn matrix_needs_two_consistent_series() {
        let plan = make_block_plan(32, 2).unwrap();
        assert!(similarity_matrix(&[lcg_series(32, 3, 1)], &plan).is_err());
        assert!(similarity_matrix(&[lcg_series(32, 3, 1), lcg_series(32, 2, 1)], &plan).is_err());
    }

    #[test]
    fn loaded_matrix_validation() {
        let ids = alloc::vec!["a".into(), "b".into()];
        let asym = Matrix::from_rows(&[alloc::vec![0.0, 0.5], alloc::vec![0.4, 0.0]]).unwrap();
        assert!(SimilarityMatrix::new(ids.clone(), asym, 1e-8).is_err());
        let ok = Matrix::from_rows(&[alloc::vec![0.1, 0.5], alloc::vec![0.5, 0.0]]).unwrap();
        let sim = SimilarityMatrix::new(ids, ok, 1e-8).unwrap();
        assert_eq!(sim.get(0, 0), 0.0);
    }
}
