//! Equal-time cross-correlation analysis of return series against the
//! Wishart (random-matrix) benchmark, with shuffle-surrogate validation,
//! eigenvector sector attribution and a seeded multi-factor market
//! simulator.
//!
//! The pipeline: [`ingest`] aligns prices onto a common calendar,
//! [`transform`] produces normalized log returns and the correlation matrix,
//! [`spectrum`] diagonalizes it and compares against the analytic Wishart
//! spectrum, [`sectors`] attributes the deviating modes to labels, and
//! [`simulator`] generates synthetic markets that reproduce the same
//! spectral structure.

pub mod fmt;
pub mod hist;
pub mod ingest;
pub mod rng;
pub mod sectors;
pub mod simulator;
pub mod spectrum;
pub mod transform;

pub use ingest::{Category, LeadingGapPolicy, PriceTable, SectorInfo, SectorMap};
pub use spectrum::{SpectrumResult, WishartBounds};
pub use transform::{CorrMatrix, ReturnMatrix};
