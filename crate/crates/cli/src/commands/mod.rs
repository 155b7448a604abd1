//! Subcommand implementations and the analysis pipeline they share.

pub mod analyze;
pub mod mp_bounds;
pub mod simulate;
pub mod surrogate;

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use xcorr_core::hist::Histogram;
use xcorr_core::ingest::{Category, SectorMap};
use xcorr_core::sectors::{composition_report, CompositionReport};
use xcorr_core::spectrum::{deviating_eigenvalues, eigensolve, shuffle_surrogate, SpectrumResult};
use xcorr_core::transform::{correlation, element_stats, ReturnMatrix};

use crate::artifacts;
use crate::error::CliError;
use crate::report::{
    AnalysisReport, CompositionEntry, DatasetSummary, ElementStatsReport, HistogramReport,
    ParamsSummary, Period, ShareEntry, SpectrumSummary, SurrogateSummary, REPORT_VERSION,
};

/// Analysis knobs shared by `analyze` and `simulate --analyze`.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub tol: f64,
    pub margin: f64,
    pub bin_width: f64,
    pub eig_bin_width: f64,
    pub thresholds: Vec<f64>,
    /// None: first four modes (clamped to N).
    pub modes: Option<Vec<usize>>,
    pub surrogate_replicates: usize,
    pub seed: u64,
    pub dump_corr: bool,
}

impl AnalysisOptions {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.tol <= 0.0 {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.margin < 0.0 {
            return Err(CliError::Usage(format!("--margin must be >= 0, got {}", self.margin)));
        }
        if !(0.0 < self.bin_width && self.bin_width <= 2.0) {
            return Err(CliError::Usage(format!(
                "--bin-width must be in (0, 2], got {}",
                self.bin_width
            )));
        }
        if self.eig_bin_width <= 0.0 {
            return Err(CliError::Usage(format!(
                "--eig-bin-width must be positive, got {}",
                self.eig_bin_width
            )));
        }
        if self.thresholds.is_empty() {
            return Err(CliError::Usage("--thresholds must list at least one value".into()));
        }
        for &u in &self.thresholds {
            if !(0.0 < u && u <= 1.0) {
                return Err(CliError::Usage(format!("threshold u_c = {u} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

/// Where the return matrix came from, for the report header.
#[derive(Debug, Clone)]
pub struct DatasetMeta {
    pub source: String,
    pub dt: usize,
    pub period: Option<(NaiveDate, NaiveDate)>,
    pub dropped: Vec<String>,
}

fn share_map<K: Ord, F: Fn(&K) -> String>(
    shares: &BTreeMap<K, xcorr_core::sectors::LabelShare>,
    label_of: F,
) -> BTreeMap<String, ShareEntry> {
    shares
        .iter()
        .map(|(k, s)| {
            (label_of(k), ShareEntry { count: s.count, percent: s.fraction.map(|f| f * 100.0) })
        })
        .collect()
}

fn composition_entries(report: &CompositionReport) -> Vec<CompositionEntry> {
    report
        .rows
        .iter()
        .map(|row| CompositionEntry {
            mode: row.mode,
            u_c: row.u_c,
            total: row.total,
            categories: share_map(&row.by_category, |c: &Category| c.label().to_owned()),
            sectors: share_map(&row.by_sector, |s: &String| s.clone()),
        })
        .collect()
}

fn eigenvalue_histogram(s: &SpectrumResult, bin_width: f64) -> Histogram {
    let top = s.eigenvalues.first().copied().unwrap_or(1.0).max(s.bounds.lambda_max_ran);
    let hi = (top / bin_width).ceil().max(1.0) * bin_width;
    let mut hist = Histogram::with_range(0.0, hi, bin_width);
    hist.insert_all(s.eigenvalues.iter().copied());
    hist
}

/// Correlation, spectrum, composition and surrogate pass over a return
/// matrix; writes every artifact into `out_dir` and prints a short summary.
pub fn run_analysis(
    rm: &ReturnMatrix,
    map: &SectorMap,
    meta: DatasetMeta,
    opts: &AnalysisOptions,
    out_dir: &Path,
) -> Result<AnalysisReport, CliError> {
    opts.validate()?;
    let n = rm.n_stocks();
    if n < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 stocks with non-degenerate returns, have {n}"
        )));
    }

    let corr = correlation(rm);
    let stats = element_stats(&corr, opts.bin_width);
    let mut spectrum = eigensolve(&corr, opts.tol)?;
    spectrum.deviating = deviating_eigenvalues(&spectrum, opts.margin);

    let modes: Vec<usize> = match &opts.modes {
        Some(ms) => ms.clone(),
        None => (0..n.min(4)).collect(),
    };
    let composition = composition_report(&spectrum, map, &modes, &opts.thresholds)?;
    let eig_hist = eigenvalue_histogram(&spectrum, opts.eig_bin_width);

    artifacts::ensure_dir(out_dir)?;
    artifacts::write_file(&artifacts::out_path(out_dir, "spectrum.csv"), &artifacts::spectrum_csv(&spectrum))?;
    artifacts::write_file(&artifacts::out_path(out_dir, "eigvecs.csv"), &artifacts::eigvecs_csv(&spectrum))?;
    artifacts::write_file(
        &artifacts::out_path(out_dir, "hist_elements.csv"),
        &artifacts::hist_csv(&stats.histogram),
    )?;
    artifacts::write_file(&artifacts::out_path(out_dir, "hist_eigs.csv"), &artifacts::hist_csv(&eig_hist))?;
    artifacts::write_file(
        &artifacts::out_path(out_dir, "composition.csv"),
        &artifacts::composition_csv(&composition),
    )?;
    artifacts::write_file(
        &artifacts::out_path(out_dir, "components.csv"),
        &artifacts::components_csv(&spectrum, map, &modes),
    )?;
    if opts.dump_corr {
        artifacts::write_file(&artifacts::out_path(out_dir, "corr.csv"), &corr.to_csv())?;
    }

    let surrogate = if opts.surrogate_replicates > 0 {
        let spectra = shuffle_surrogate(rm, opts.seed, opts.surrogate_replicates)?;
        artifacts::write_file(
            &artifacts::out_path(out_dir, "surrogate_spectra.csv"),
            &artifacts::surrogate_spectra_csv(&spectra),
        )?;
        Some(surrogate_summary(&spectra, opts.seed))
    } else {
        None
    };

    let trace: f64 = spectrum.eigenvalues.iter().sum();
    let report = AnalysisReport {
        version: REPORT_VERSION.to_owned(),
        dataset: DatasetSummary {
            source: meta.source,
            n,
            t: rm.n_steps(),
            q: spectrum.bounds.q,
            period: meta.period.map(|(start, end)| Period {
                start: start.to_string(),
                end: end.to_string(),
            }),
            dropped_tickers: meta.dropped,
        },
        params: ParamsSummary {
            dt: meta.dt,
            tol: opts.tol,
            margin: opts.margin,
            bin_width: opts.bin_width,
            eig_bin_width: opts.eig_bin_width,
            thresholds: opts.thresholds.clone(),
            modes,
            seed: opts.seed,
        },
        element_stats: ElementStatsReport {
            mean: stats.mean,
            min: stats.min,
            max: stats.max,
            count_negative: stats.count_negative,
            histogram: HistogramReport {
                edges: stats.histogram.edges.clone(),
                counts: stats.histogram.counts.clone(),
            },
        },
        spectrum: SpectrumSummary {
            lambda_0: spectrum.eigenvalues[0],
            bounds: spectrum.bounds,
            deviating: spectrum.deviating.clone(),
            deviating_count: spectrum.deviating.len(),
            residual_max: spectrum.residual_max,
            trace,
            eigenvalues: spectrum.eigenvalues.clone(),
        },
        surrogate,
        composition: composition_entries(&composition),
    };

    let json = serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    artifacts::write_file(&artifacts::out_path(out_dir, "report.json"), &(json + "\n"))?;

    print_summary(&report);
    Ok(report)
}

fn surrogate_summary(spectra: &[SpectrumResult], seed: u64) -> SurrogateSummary {
    let (band_lo, band_hi) = spectra
        .first()
        .map(|s| s.bounds.surrogate_band())
        .unwrap_or((0.0, 0.0));
    let mut inside = 0usize;
    let mut total = 0usize;
    let mut max_eigenvalue = f64::NEG_INFINITY;
    for s in spectra {
        for &l in &s.eigenvalues {
            total += 1;
            if l >= band_lo && l <= band_hi {
                inside += 1;
            }
            max_eigenvalue = max_eigenvalue.max(l);
        }
    }
    SurrogateSummary {
        seed,
        replicates: spectra.len(),
        band_lo,
        band_hi,
        band_compliance: if total == 0 { 1.0 } else { inside as f64 / total as f64 },
        max_eigenvalue: if total == 0 { f64::NAN } else { max_eigenvalue },
    }
}

fn print_summary(report: &AnalysisReport) {
    let d = &report.dataset;
    println!("dataset: N={} T={} Q={:.4} (source: {})", d.n, d.t, d.q, d.source);
    if !d.dropped_tickers.is_empty() {
        println!("dropped {} zero-variance ticker(s): {}", d.dropped_tickers.len(), d.dropped_tickers.join(" "));
    }
    let e = &report.element_stats;
    println!(
        "elements: mean {:.4}, min {:.4}, max {:.4}, negative {}",
        e.mean, e.min, e.max, e.count_negative
    );
    let s = &report.spectrum;
    println!(
        "spectrum: lambda_0 = {:.4}, wishart band [{:.4}, {:.4}], deviating {}, residual {:.2e}",
        s.lambda_0, s.bounds.lambda_min_ran, s.bounds.lambda_max_ran, s.deviating_count, s.residual_max
    );
    if let Some(sur) = &report.surrogate {
        println!(
            "surrogate: {} replicate(s), band [{:.4}, {:.4}], compliance {:.2}%",
            sur.replicates,
            sur.band_lo,
            sur.band_hi,
            sur.band_compliance * 100.0
        );
    }
}
