//! Second-order similarity, spectral clustering and equality testing for
//! (possibly non-stationary) functional time series.
//!
//! Curves are carried as coefficient vectors in an orthonormal Fourier basis
//! of `L²([0,1])`. Each series is split into `M` blocks of `N` curves; the
//! blockwise functional DFT gives rank-one local periodogram tensors whose
//! Hilbert–Schmidt inner products at neighbouring frequencies are aggregated
//! into the pairwise dissimilarity `Â`. The resulting matrix feeds a
//! normalized-Laplacian spectral clustering and a pairwise asymptotic test.
//!
//! The crate is `no_std` (it needs `alloc`). IO, the command line and
//! parallel fan-out live in the `ftspec-cli` companion crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cluster;
pub mod equality;
mod error;
pub mod linalg;
pub mod models;
pub mod normal;
pub mod rng;
pub mod series;
pub mod spectra;
mod sum;

pub use crate::error::{Error, Result};
pub use crate::linalg::Matrix;
pub use crate::series::{BasisFamily, BasisSpec, FunctionalTimeSeries, GriddedSample};
pub use crate::spectra::{BlockPlan, FStatBundle, LocalFdftTable, SimilarityMatrix};
