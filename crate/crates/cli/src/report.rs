//! `report.json` document model.
//!
//! Field order is fixed by struct order and all maps are ordered, so
//! regenerating a report from the same inputs is byte-identical. The shape
//! is described by `schema/report.schema.json`; bump the crate version on
//! any schema change.

use std::collections::BTreeMap;

use serde::Serialize;
use xcorr_core::spectrum::WishartBounds;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub version: String,
    pub dataset: DatasetSummary,
    pub params: ParamsSummary,
    pub element_stats: ElementStatsReport,
    pub spectrum: SpectrumSummary,
    pub surrogate: Option<SurrogateSummary>,
    pub composition: Vec<CompositionEntry>,
}

#[derive(Debug, Serialize)]
pub struct DatasetSummary {
    /// "prices" for CSV input, "simulation" for generated markets.
    pub source: String,
    pub n: usize,
    pub t: usize,
    pub q: f64,
    pub period: Option<Period>,
    /// Tickers removed by the zero-variance policy.
    pub dropped_tickers: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Period {
    pub start: String,
    pub end: String,
}

#[derive(Debug, Serialize)]
pub struct ParamsSummary {
    pub dt: usize,
    pub tol: f64,
    pub margin: f64,
    pub bin_width: f64,
    pub eig_bin_width: f64,
    pub thresholds: Vec<f64>,
    pub modes: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct ElementStatsReport {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub count_negative: usize,
    pub histogram: HistogramReport,
}

#[derive(Debug, Serialize)]
pub struct HistogramReport {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct SpectrumSummary {
    pub lambda_0: f64,
    pub bounds: WishartBounds,
    pub deviating: Vec<usize>,
    pub deviating_count: usize,
    pub residual_max: f64,
    pub trace: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SurrogateSummary {
    pub seed: u64,
    pub replicates: usize,
    pub band_lo: f64,
    pub band_hi: f64,
    /// Fraction of all surrogate eigenvalues inside the band.
    pub band_compliance: f64,
    pub max_eigenvalue: f64,
}

#[derive(Debug, Serialize)]
pub struct CompositionEntry {
    pub mode: usize,
    pub u_c: f64,
    pub total: usize,
    pub categories: BTreeMap<String, ShareEntry>,
    pub sectors: BTreeMap<String, ShareEntry>,
}

#[derive(Debug, Serialize)]
pub struct ShareEntry {
    pub count: usize,
    /// Exact percentage; null when the dominant set is empty.
    pub percent: Option<f64>,
}
