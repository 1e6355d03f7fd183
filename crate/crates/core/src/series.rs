//! Curves as coefficient vectors in an orthonormal Fourier basis of `L²([0,1])`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFamily {
    Fourier,
}

/// Orthonormal basis `ψ_1 … ψ_L` on `[0,1]`.
///
/// Fourier ordering: `ψ_1 = 1`, `ψ_{2m} = √2 cos(2πmτ)`, `ψ_{2m+1} = √2 sin(2πmτ)`.
/// Odd and even `L` are both allowed; an even `L` ends on a cosine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    family: BasisFamily,
    dimension: usize,
}

impl BasisSpec {
    /// Default dimension for simulated series.
    pub const SIMULATION_DIMENSION: usize = 15;
    /// Default dimension when fitting gridded observations.
    pub const INGEST_DIMENSION: usize = 21;

    pub fn fourier(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Parameter("basis dimension must be at least 1".into()));
        }
        Ok(Self {
            family: BasisFamily::Fourier,
            dimension,
        })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `ψ_l(τ)` for 1-based `l`.
    pub fn value(&self, l: usize, tau: f64) -> f64 {
        match self.family {
            BasisFamily::Fourier => fourier_element(l, tau),
        }
    }
}

fn fourier_element(l: usize, tau: f64) -> f64 {
    debug_assert!(l >= 1);
    if l == 1 {
        1.0
    } else if l.is_multiple_of(2) {
        let m = (l / 2) as f64;
        SQRT_2 * libm::cos(2.0 * PI * m * tau)
    } else {
        let m = ((l - 1) / 2) as f64;
        SQRT_2 * libm::sin(2.0 * PI * m * tau)
    }
}

/// `P × L` matrix with entry `(p, l) = ψ_{l+1}(τ_p)`.
pub fn evaluate_basis(spec: &BasisSpec, grid: &[f64]) -> Result<Matrix> {
    if let Some(&bad) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Domain(format!("grid point {bad} outside [0,1]")));
    }
    Ok(Matrix::from_fn(grid.len(), spec.dimension(), |p, l| {
        spec.value(l + 1, grid[p])
    }))
}

/// Evaluates the curve with coefficients `coeffs` at `tau`.
pub fn reconstruct(spec: &BasisSpec, coeffs: &[f64], tau: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| c * spec.value(l + 1, tau))
        .sum()
}

/// `Σ_l a_l · conj(b_l)`: the `L²` inner product of the curves the vectors represent.
pub fn coeff_inner_product(a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "coefficient inner product",
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(inner(a, b))
}

#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        // x · conj(y)
        re += x.re * y.re + x.im * y.im;
        im += x.im * y.re - x.re * y.im;
    }
    Complex64::new(re, im)
}

/// A length-`T` sequence of curves stored as a `T × L` coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalTimeSeries {
    id: String,
    coeffs: Matrix,
    basis: BasisSpec,
}

impl FunctionalTimeSeries {
    pub fn new(id: impl Into<String>, coeffs: Matrix, basis: BasisSpec) -> Result<Self> {
        if coeffs.nrows() < 2 {
            return Err(Error::Parameter(format!(
                "a functional time series needs T >= 2, got {}",
                coeffs.nrows()
            )));
        }
        if coeffs.ncols() != basis.dimension() {
            return Err(Error::Dimension {
                what: "coefficient columns vs basis dimension",
                expected: basis.dimension(),
                found: coeffs.ncols(),
            });
        }
        if !coeffs.all_finite() {
            return Err(Error::Numeric("non-finite basis coefficient"));
        }
        Ok(Self {
            id: id.into(),
            coeffs,
            basis,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    /// Number of curves `T`.
    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Basis dimension `L`.
    pub fn dim(&self) -> usize {
        self.coeffs.ncols()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Every curve multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            id: self.id.clone(),
            coeffs: self.coeffs.scaled(factor),
            basis: self.basis,
        }
    }

    /// Subtracts the pointwise sample mean curve.
    pub fn centered(&self) -> Self {
        let (t, l) = (self.len(), self.dim());
        let mean: Vec<f64> = (0..l)
            .map(|c| (0..t).map(|r| self.coeffs[(r, c)]).sum::<f64>() / t as f64)
            .collect();
        let coeffs = Matrix::from_fn(t, l, |r, c| self.coeffs[(r, c)] - mean[c]);
        Self {
            id: self.id.clone(),
            coeffs,
            basis: self.basis,
        }
    }
}

/// Curves observed on a common grid; `NaN` marks a missing observation.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedSample {
    values: Matrix,
    grid: Vec<f64>,
}

impl GriddedSample {
    /// Equispaced grid `τ_p = (p−1)/(P−1)`.
    pub fn equispaced(values: Matrix) -> Result<Self> {
        let p = values.ncols();
        if p < 2 {
            return Err(Error::Parameter("a grid needs at least two points".into()));
        }
        let grid = (0..p).map(|i| i as f64 / (p - 1) as f64).collect();
        Self::new(values, grid)
    }

    pub fn new(values: Matrix, grid: Vec<f64>) -> Result<Self> {
        if grid.len() != values.ncols() {
            return Err(Error::Dimension {
                what: "grid length vs gridded columns",
                expected: values.ncols(),
                found: grid.len(),
            });
        }
        if grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::Domain("grid must lie in [0,1]".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid must be strictly increasing".into()));
        }
        if values.as_slice().iter().any(|x| x.is_infinite()) {
            return Err(Error::Numeric("infinite gridded observation"));
        }
        Ok(Self { values, grid })
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn missing_fraction(&self, row: usize) -> f64 {
        let r = self.values.row(row);
        r.iter().filter(|x| x.is_nan()).count() as f64 / r.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Largest tolerated fraction of missing grid points per row.
    pub missing_cap: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { missing_cap: 0.10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowFit {
    pub coeffs: Vec<f64>,
    pub residual_norm: f64,
    pub missing_fraction: f64,
}

/// Per-row least-squares fits; missing grid points are dropped from each row's design.
pub fn fit_rows(sample: &GriddedSample, spec: &BasisSpec, opts: FitOptions) -> Result<Vec<Result<RowFit>>> {
    let design = evaluate_basis(spec, sample.grid())?;
    let l = spec.dimension();
    Ok((0..sample.values().nrows())
        .map(|row| {
            let values = sample.values().row(row);
            let missing_fraction = sample.missing_fraction(row);
            if missing_fraction > opts.missing_cap {
                return Err(Error::Fit {
                    row,
                    reason: format!(
                        "missing fraction {:.3} exceeds cap {:.3}",
                        missing_fraction, opts.missing_cap
                    ),
                });
            }
            let keep: Vec<usize> = (0..values.len()).filter(|&p| !values[p].is_nan()).collect();
            if keep.len() < l {
                return Err(Error::Fit {
                    row,
                    reason: format!("{} observed points for {} basis functions", keep.len(), l),
                });
            }
            let a = Matrix::from_fn(keep.len(), l, |i, c| design[(keep[i], c)]);
            let b: Vec<f64> = keep.iter().map(|&p| values[p]).collect();
            let fit = least_squares(&a, &b).map_err(|e| Error::Fit {
                row,
                reason: format!("{e}"),
            })?;
            Ok(RowFit {
                coeffs: fit.solution,
                residual_norm: fit.residual_norm,
                missing_fraction,
            })
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct FittedSeries {
    pub series: FunctionalTimeSeries,
    pub residual_norms: Vec<f64>,
    pub missing_fractions: Vec<f64>,
}

/// Fits every row; the first failing row aborts the fit.
pub fn fit_curves(
    id: impl Into<String>,
    sample: &GriddedSample,
    spec: &BasisSpec,
    opts: FitOptions,
) -> Result<FittedSeries> {
    let rows = fit_rows(sample, spec, opts)?;
    let mut coeffs = Vec::with_capacity(rows.len() * spec.dimension());
    let mut residual_norms = Vec::with_capacity(rows.len());
    let mut missing_fractions = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row?;
        coeffs.extend_from_slice(&row.coeffs);
        residual_norms.push(row.residual_norm);
        missing_fractions.push(row.missing_fraction);
    }
    let t = residual_norms.len();
    let series = FunctionalTimeSeries::new(id, Matrix::from_row_major(t, spec.dimension(), coeffs)?, *spec)?;
    Ok(FittedSeries {
        series,
        residual_norms,
        missing_fractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trapezoid_grid(n: usize) -> (Vec<f64>, Vec<f64>) {
        let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let h = 1.0 / (n - 1) as f64;
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h })
            .collect();
        (grid, weights)
    }

    #[test]
    fn basis_values() {
        let spec = BasisSpec::fourier(5).unwrap();
        let e = evaluate_basis(&spec, &[0.0, 0.3, 1.0]).unwrap();
        for p in 0..3 {
            assert_eq!(e[(p, 0)], 1.0);
        }
        assert!((e[(0, 1)] - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(e[(0, 2)].abs() < 1e-15);
        assert!((e[(1, 4)] - SQRT_2 * (4.0 * PI * 0.3).sin()).abs() < 1e-14);
    }

    #[test]
    fn gram_matrix_is_identity() {
        let spec = BasisSpec::fourier(9).unwrap();
        let (grid, w) = trapezoid_grid(2048);
        let e = evaluate_basis(&spec, &grid).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                let g: f64 = (0..grid.len()).map(|p| w[p] * e[(p, a)] * e[(p, b)]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((g - target).abs() < 1e-6, "gram[{a},{b}] = {g}");
            }
        }
    }

    #[test]
    fn grid_outside_unit_interval() {
        let spec = BasisSpec::fourier(3).unwrap();
        assert!(matches!(evaluate_basis(&spec, &[0.5, 1.2]), Err(Error::Domain(_))));
        assert!(BasisSpec::fourier(0).is_err());
    }

    #[test]
    fn inner_product_basics() {
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let e2 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(coeff_inner_product(&e1, &e1).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(coeff_inner_product(&e1, &e2).unwrap(), Complex64::new(0.0, 0.0));
        assert!(coeff_inner_product(&e1, &e1[..1]).is_err());
    }

    #[test]
    fn inner_product_matches_quadrature() {
        let spec = BasisSpec::fourier(5).unwrap();
        let a = [
            Complex64::new(0.3, -1.0),
            Complex64::new(0.7, 0.2),
            Complex64::new(-0.4, 0.5),
            Complex64::new(1.1, 0.0),
            Complex64::new(0.05, -0.3),
        ];
        let b = [
            Complex64::new(-0.2, 0.4),
            Complex64::new(0.9, 0.1),
            Complex64::new(0.6, -0.8),
            Complex64::new(-0.5, 0.25),
            Complex64::new(0.0, 1.0),
        ];
        let (grid, w) = trapezoid_grid(4096);
        let curve = |c: &[Complex64], t: f64| -> Complex64 {
            c.iter()
                .enumerate()
                .map(|(l, x)| x * spec.value(l + 1, t))
                .sum()
        };
        let quad: Complex64 = grid
            .iter()
            .zip(&w)
            .map(|(&t, &wt)| curve(&a, t) * curve(&b, t).conj() * wt)
            .sum();
        let fast = coeff_inner_product(&a, &b).unwrap();
        assert!((quad - fast).norm() < 1e-6);
    }

    #[test]
    fn fit_recovers_exact_coefficients() {
        let spec = BasisSpec::fourier(6).unwrap();
        let (c, d) = (1.7, -0.4);
        let grid: Vec<f64> = (0..64).map(|i| i as f64 / 63.0).collect();
        let row: Vec<f64> = grid
            .iter()
            .map(|&t| c * spec.value(1, t) + d * spec.value(3, t))
            .collect();
        let values = Matrix::from_rows(&[row.clone(), row]).unwrap();
        let sample = GriddedSample::new(values, grid).unwrap();
        let fit = fit_curves("x", &sample, &spec, FitOptions::default()).unwrap();
        let expected = [c, 0.0, d, 0.0, 0.0, 0.0];
        for r in 0..2 {
            for (got, want) in fit.series.coeffs().row(r).iter().zip(expected) {
                assert!((got - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_rows() {
        let spec = BasisSpec::fourier(5).unwrap();
        let values = Matrix::from_fn(3, 40, |_, _| 5.0);
        let sample = GriddedSample::equispaced(values).unwrap();
        let fit = fit_curves("c", &sample, &spec, FitOptions::default()).unwrap();
        let row = fit.series.coeffs().row(1);
        assert!((row[0] - 5.0).abs() < 1e-9);
        assert!(row[1..].iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn missing_points_dropped_from_fit() {
        let spec = BasisSpec::fourier(7).unwrap();
        let coeffs = [0.5, -1.0, 0.25, 0.8, 0.0, -0.3, 0.1];
        let grid: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let full: Vec<f64> = grid.iter().map(|&t| reconstruct(&spec, &coeffs, t)).collect();
        let mut holed = full.clone();
        for p in (3..100).step_by(10) {
            holed[p] = f64::NAN;
        }
        let sample = GriddedSample::new(Matrix::from_rows(&[full, holed]).unwrap(), grid).unwrap();
        let fit = fit_curves("m", &sample, &spec, FitOptions::default()).unwrap();
        let c = fit.series.coeffs();
        for l in 0..7 {
            assert!((c[(0, l)] - c[(1, l)]).abs() < 1e-6);
            assert!((c[(0, l)] - coeffs[l]).abs() < 1e-9);
        }
        assert!((fit.missing_fractions[1] - 0.10).abs() < 1e-12);
    }

    #[test]
    fn fit_errors_name_the_row() {
        let spec = BasisSpec::fourier(5).unwrap();
        let mut values = Matrix::from_fn(3, 10, |_, p| p as f64);
        for p in 0..7 {
            values[(2, p)] = f64::NAN;
        }
        let sample = GriddedSample::equispaced(values).unwrap();
        let loose = FitOptions { missing_cap: 1.0 };
        match fit_curves("x", &sample, &spec, loose) {
            Err(Error::Fit { row, .. }) => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
        match fit_curves("x", &sample, &spec, FitOptions::default()) {
            Err(Error::Fit { row, reason }) => {
                assert_eq!(row, 2);
                assert!(reason.contains("exceeds cap"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn grid_validation() {
        let v = Matrix::zeros(2, 3);
        assert!(GriddedSample::new(v.clone(), vec![0.0, 0.5, 0.5]).is_err());
        assert!(GriddedSample::new(v.clone(), vec![0.0, 0.5, 1.5]).is_err());
        assert!(GriddedSample::new(v, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn series_validation_and_centering() {
        let spec = BasisSpec::fourier(2).unwrap();
        assert!(FunctionalTimeSeries::new("a", Matrix::zeros(1, 2), spec).is_err());
        assert!(FunctionalTimeSeries::new("a", Matrix::zeros(4, 3), spec).is_err());
        let mut m = Matrix::zeros(4, 2);
        m[(0, 0)] = f64::NAN;
        assert!(FunctionalTimeSeries::new("a", m, spec).is_err());

        let x = FunctionalTimeSeries::new("a", Matrix::from_fn(4, 2, |r, c| (r * 2 + c) as f64), spec).unwrap();
        let centered = x.centered();
        for c in 0..2 {
            let s: f64 = centered.coeffs().column(c).iter().sum();
            assert!(s.abs() < 1e-12);
        }
    }
}
