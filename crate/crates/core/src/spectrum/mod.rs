//! Eigenvalue spectra of correlation matrices against the Wishart benchmark.
//!
//! A correlation matrix of N mutually uncorrelated series of length T has
//! eigenvalues confined (asymptotically) to `[(1 - 1/sqrt(Q))^2,
//! (1 + 1/sqrt(Q))^2]` with `Q = T/N`. Eigenvalues escaping the upper bound
//! signal genuine equal-time correlation; the shuffle surrogate destroys
//! exactly those correlations and should collapse the spectrum back into the
//! band.

mod jacobi;

pub use jacobi::{symmetric_eigen, EigenDecomposition, MAX_SWEEPS};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::rng::substream;
use crate::transform::{correlation, CorrMatrix, ReturnMatrix};

/// Default Jacobi convergence threshold, relative to the Frobenius norm.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default finite-size buffer on the deviating-eigenvalue cut.
pub const DEFAULT_DEVIATION_MARGIN: f64 = 0.05;
/// Absolute widening of the Wishart band used for surrogate compliance.
pub const SURROGATE_BAND_MARGIN: f64 = 0.1;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("jacobi sweep limit {limit} exceeded (max off-diagonal {max_off:e})")]
    NoConvergence { limit: usize, max_off: f64 },
    #[error("Q = T/N = {q} is below one (N = {n}, T = {t})")]
    QBelowOne { n: usize, t: usize, q: f64 },
}

/// Eigenvalue support of the Wishart (random) correlation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WishartBounds {
    pub q: f64,
    pub lambda_min_ran: f64,
    pub lambda_max_ran: f64,
}

impl WishartBounds {
    /// Band used for surrogate compliance: the support widened by
    /// [`SURROGATE_BAND_MARGIN`] on both sides.
    pub fn surrogate_band(&self) -> (f64, f64) {
        (self.lambda_min_ran - SURROGATE_BAND_MARGIN, self.lambda_max_ran + SURROGATE_BAND_MARGIN)
    }
}

/// Spectrum of one correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub tickers: Vec<String>,
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column k pairs with `eigenvalues[k]`; orthonormal and oriented so the
    /// largest-magnitude component of each vector is positive.
    pub eigenvectors: Array2<f64>,
    pub residual_max: f64,
    pub bounds: WishartBounds,
    /// Indices with `lambda > lambda_max_ran * (1 + margin)`.
    pub deviating: Vec<usize>,
}

impl SpectrumResult {
    pub fn order(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Component of stock `i` in mode `k`.
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.eigenvectors[[i, k]]
    }
}

/// Wishart spectral bounds for N series of length T (`Q = T/N >= 1`).
pub fn mp_bounds(n: usize, t: usize) -> Result<WishartBounds, SpectrumError> {
    let q = t as f64 / n as f64;
    if q < 1.0 {
        return Err(SpectrumError::QBelowOne { n, t, q });
    }
    Ok(bounds_for_q(q))
}

fn bounds_for_q(q: f64) -> WishartBounds {
    let s = 1.0 / q.sqrt();
    WishartBounds {
        q,
        lambda_min_ran: (1.0 - s) * (1.0 - s),
        lambda_max_ran: (1.0 + s) * (1.0 + s),
    }
}

/// Wishart eigenvalue density at `lambda` for ratio `q >= 1`.
///
/// `(Q / 2 pi) * sqrt((lambda_max - lambda)(lambda - lambda_min)) / lambda`
/// inside the support, 0 outside (edges included as 0).
pub fn mp_density(lambda: f64, q: f64) -> f64 {
    let b = bounds_for_q(q);
    if lambda <= 0.0 || lambda < b.lambda_min_ran || lambda > b.lambda_max_ran {
        return 0.0;
    }
    let radicand = (b.lambda_max_ran - lambda) * (lambda - b.lambda_min_ran);
    q / (2.0 * std::f64::consts::PI) * radicand.max(0.0).sqrt() / lambda
}

/// Indices of eigenvalues above `lambda_max_ran * (1 + margin)`.
pub fn deviating_eigenvalues(s: &SpectrumResult, margin: f64) -> Vec<usize> {
    let cut = s.bounds.lambda_max_ran * (1.0 + margin);
    s.eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cut)
        .map(|(k, _)| k)
        .collect()
}

/// Full spectrum of a correlation matrix.
///
/// Cyclic Jacobi down to `tol * ||C||_F`, eigenpairs sorted and oriented,
/// Wishart bounds from `(N, t_len)` and the deviating set at the default
/// margin.
pub fn eigensolve(c: &CorrMatrix, tol: f64) -> Result<SpectrumResult, SpectrumError> {
    let dec = symmetric_eigen(&c.values, tol)?;
    let bounds = mp_bounds(c.order(), c.t_len)?;
    let mut result = SpectrumResult {
        tickers: c.tickers.clone(),
        eigenvalues: dec.eigenvalues,
        eigenvectors: dec.eigenvectors,
        residual_max: dec.residual_max,
        bounds,
        deviating: Vec::new(),
    };
    result.deviating = deviating_eigenvalues(&result, DEFAULT_DEVIATION_MARGIN);
    Ok(result)
}

/// Spectra of time-shuffled surrogates of `rm`.
///
/// Each replicate permutes every stock's return row independently in time
/// (stream keyed by seed, replicate and stock index), destroying equal-time
/// correlations while preserving each row's marginal distribution. A
/// permutation leaves the row mean and sigma unchanged, so rows stay
/// normalized and the correlation matrix is recomputed directly. Replicates
/// are independent and run in parallel; outputs depend only on
/// `(seed, n_shuffles)`.
pub fn shuffle_surrogate(
    rm: &ReturnMatrix,
    seed: u64,
    n_shuffles: usize,
) -> Result<Vec<SpectrumResult>, SpectrumError> {
    (0..n_shuffles)
        .into_par_iter()
        .map(|rep| {
            let mut shuffled = rm.returns.clone();
            for i in 0..rm.n_stocks() {
                let mut rng = substream(seed, "shuffle", &[rep as u64, i as u64]);
                let mut row = shuffled.row_mut(i);
                row.as_slice_mut().expect("row-major").shuffle(&mut rng);
            }
            let surrogate = ReturnMatrix {
                tickers: rm.tickers.clone(),
                returns: shuffled,
                raw_mean: rm.raw_mean.clone(),
                raw_sigma: rm.raw_sigma.clone(),
                interval: rm.interval,
            };
            eigensolve(&correlation(&surrogate), DEFAULT_TOL)
        })
        .collect()
}
